#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nlsgs/fem.hpp"
#include "nlsgs/soliton.hpp"

namespace nlsgs {

/// An initial field and the name it is reported under ("constant",
/// "vertex-2", "random-1", ...).
struct LabeledStart
{
  std::string label;
  Field field;
};

/// A boundary node where two boundary edges with different tags meet.
struct Corner
{
  std::size_t node = 0;
  Point2 point;
  /// Sum of the incident triangle angles (the internal angle of the region).
  double angle = 0.0;
  /// Tag of the outgoing boundary edge; for polygon meshes this is the
  /// polygon vertex index.
  int tag = 0;
};

/// Corners ordered by tag (polygon vertices first, in polygon order).
std::vector<Corner> mesh_corners(const TriMesh &mesh);

/// Frequencies for which a soliton bump at the corner fits inside the region
/// (lower end) and is still resolved by the local mesh (upper end).
std::pair<double, double> bump_lambda_range(const FemSpace &space, const Corner &corner);

/// Frequency of a corner bump: the value matching the sector mass to `mu`,
/// clamped so the bump both fits in the region and is resolved by the mesh.
double corner_bump_lambda(const FemSpace &space, const Corner &corner,
                          const SolitonProfile &profile, double mu);

/// 1 + sum of three Gaussian bumps with seeded random centres, widths and
/// heights; strictly positive and smooth on the mesh scale.
Field random_positive_field(std::shared_ptr<const FemSpace> space, std::uint64_t seed);

/// Scales u to mass mu exactly (consistent mass matrix).
Field rescale_to_mass(const Field &u, double mu);

}  // namespace nlsgs
