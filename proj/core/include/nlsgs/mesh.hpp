#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlsgs/geometry.hpp"

namespace nlsgs {

/// Boundary tag of edges lying on the circular truncation of a sector.
inline constexpr int kTruncationArc = -1;

struct BoundaryEdge
{
  int a = 0;
  int b = 0;
  /// Polygon side index (side i joins vertex i to vertex i+1), or kTruncationArc.
  int tag = 0;
};

/// Circle carrying the kTruncationArc edges. Refinement projects new arc
/// midpoints onto it.
struct ArcBoundary
{
  Point2 center;
  double radius = 1.0;
};

using Triangle = std::array<int, 3>;

/// Conforming triangulation of a planar region.
class TriMesh
{
public:
  TriMesh() = default;
  TriMesh(std::vector<Point2> nodes, std::vector<Triangle> triangles,
          std::vector<BoundaryEdge> boundary, std::optional<ArcBoundary> arc = {});

  const std::vector<Point2> &nodes() const noexcept { return nodes_; }
  const std::vector<Triangle> &triangles() const noexcept { return triangles_; }
  const std::vector<BoundaryEdge> &boundary_edges() const noexcept { return boundary_; }
  const std::optional<ArcBoundary> &arc() const noexcept { return arc_; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t triangle_count() const noexcept { return triangles_.size(); }
  double h_max() const noexcept { return h_max_; }
  double h_min() const noexcept { return h_min_; }

  double triangle_area(std::size_t t) const;
  double area() const;
  Point2 centroid(std::size_t t) const;

  /// Index of the node at `p` (within a relative 1e-10 of the mesh size), if any.
  std::optional<std::size_t> find_node(Point2 p) const;

private:
  std::vector<Point2> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::optional<ArcBoundary> arc_;
  double h_max_ = 0.0;
  double h_min_ = 0.0;
};

/// Ear clipping of the polygon followed by uniform refinement until h_max <= h_target.
TriMesh triangulate(const Polygon &polygon, double h_target);

/// Ear clipping only (n - 2 triangles).
TriMesh ear_clip(const Polygon &polygon);

/// Red refinement of every triangle (x4 triangles, h_max halved).
TriMesh refine_uniform(const TriMesh &mesh);

/// Local red refinement of all triangles meeting the closed disk, repeated
/// `levels` times; hanging nodes are removed by a final green bisection pass.
TriMesh refine_near_vertex(const TriMesh &mesh, Point2 vertex, double radius, int levels);

/// Multi-level local refinement: at level l (1-based) a triangle is split when
/// `mark(l, a, b, c)` is true. Closure keeps the mesh 1-irregular between levels
/// and the final mesh conforming.
using RefineMarker = std::function<bool(int level, Point2 a, Point2 b, Point2 c)>;
TriMesh refine_marked(const TriMesh &mesh, const RefineMarker &mark, int levels);

/// Mesh of the sector of angle alpha truncated at radius R, apex at the origin,
/// first ray along +x. Ray sides carry tags 0 (theta = 0) and 1 (theta = alpha).
TriMesh sector_mesh(const SectorSpec &spec, double h_target);

/// Sector mesh graded towards the apex: h <= h_apex inside `fine_radius`, with
/// the element size growing geometrically outside.
TriMesh graded_sector_mesh(const SectorSpec &spec, double h_coarse, double h_apex,
                           double fine_radius);

/// Counts of edge incidences; a conforming mesh has interior edges shared by
/// two triangles and boundary edges by one.
struct EdgeAudit
{
  std::size_t interior_edges = 0;
  std::size_t boundary_edges = 0;
  std::size_t bad_edges = 0;          ///< edges with incidence > 2
  std::size_t untagged_boundary = 0;  ///< incidence-1 edges missing from boundary_edges
  std::size_t stray_tags = 0;         ///< tagged edges that are not incidence-1
  std::size_t hanging_nodes = 0;      ///< nodes lying inside another triangle's edge
  bool conforming() const
  {
    return bad_edges == 0 && untagged_boundary == 0 && stray_tags == 0 && hanging_nodes == 0;
  }
};
EdgeAudit audit_edges(const TriMesh &mesh);

void write_mesh(std::ostream &out, const TriMesh &mesh);
TriMesh read_mesh(std::istream &in);
void save_mesh(const std::string &path, const TriMesh &mesh);
TriMesh load_mesh(const std::string &path);

}  // namespace nlsgs
