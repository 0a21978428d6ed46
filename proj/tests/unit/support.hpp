#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "nlsgs/fem.hpp"
#include "nlsgs/geometry.hpp"
#include "nlsgs/mesh.hpp"

namespace testing {

inline std::shared_ptr<const nlsgs::FemSpace> square_space(double h)
{
  return nlsgs::FemSpace::create(nlsgs::triangulate(nlsgs::builtin::unit_square(), h));
}

inline std::shared_ptr<const nlsgs::FemSpace> triangle_space(double h)
{
  return nlsgs::FemSpace::create(nlsgs::triangulate(nlsgs::builtin::equilateral(), h));
}

inline nlsgs::Polygon rectangle(double x0, double y0, double x1, double y1)
{
  return nlsgs::Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

/// Disjoint union of meshes: no nodes are shared, so a nodal field may jump
/// across the seams.
inline nlsgs::TriMesh disjoint_union(const std::vector<nlsgs::TriMesh> &parts)
{
  std::vector<nlsgs::Point2> nodes;
  std::vector<nlsgs::Triangle> tris;
  std::vector<nlsgs::BoundaryEdge> edges;
  for (const auto &m : parts)
  {
    const int off = static_cast<int>(nodes.size());
    nodes.insert(nodes.end(), m.nodes().begin(), m.nodes().end());
    for (auto t : m.triangles())
    {
      tris.push_back({t[0] + off, t[1] + off, t[2] + off});
    }
    for (auto e : m.boundary_edges())
    {
      edges.push_back({e.a + off, e.b + off, e.tag});
    }
  }
  return nlsgs::TriMesh(std::move(nodes), std::move(tris), std::move(edges));
}

/// Every triangle gets its own three nodes.
inline nlsgs::TriMesh broken(const nlsgs::TriMesh &mesh)
{
  std::vector<nlsgs::Point2> nodes;
  std::vector<nlsgs::Triangle> tris;
  for (auto t : mesh.triangles())
  {
    const int off = static_cast<int>(nodes.size());
    for (int k = 0; k < 3; ++k)
    {
      nodes.push_back(mesh.nodes()[static_cast<std::size_t>(t[k])]);
    }
    tris.push_back({off, off + 1, off + 2});
  }
  return nlsgs::TriMesh(std::move(nodes), std::move(tris), {});
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64 &rng, double lo = -1.0,
                                         double hi = 1.0)
{
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto &x : v)
  {
    x = d(rng);
  }
  return v;
}

/// Smooth random field: sum of a few random Fourier modes plus an offset.
inline nlsgs::Field smooth_random_field(std::shared_ptr<const nlsgs::FemSpace> space,
                                        std::mt19937_64 &rng, double offset = 1.0)
{
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  double a[4];
  double kx[4];
  double ky[4];
  for (int m = 0; m < 4; ++m)
  {
    a[m] = 0.5 * d(rng);
    kx[m] = 3.0 * d(rng);
    ky[m] = 3.0 * d(rng);
  }
  std::vector<double> v(space->size());
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    const auto x = space->mesh().nodes()[i];
    v[i] = offset;
    for (int m = 0; m < 4; ++m)
    {
      v[i] += a[m] * std::cos(kx[m] * x.x + ky[m] * x.y + m);
    }
  }
  return nlsgs::Field(std::move(space), std::move(v));
}

}  // namespace testing
