#include "nlsgs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

#include "nlsgs/errors.hpp"

namespace nlsgs {

namespace {

std::uint64_t edge_key(int a, int b)
{
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b)
{
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

double point_triangle_distance(Point2 p, Point2 a, Point2 b, Point2 c)
{
  const double o1 = orient(a, b, p);
  const double o2 = orient(b, c, p);
  const double o3 = orient(c, a, p);
  if (o1 >= 0 && o2 >= 0 && o3 >= 0)
  {
    return 0.0;
  }
  return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                   point_segment_distance(p, c, a)});
}

/// Hierarchical red refinement with deferred green closure.
class Refiner
{
public:
  explicit Refiner(const TriMesh &mesh)
    : nodes_(mesh.nodes()), leaves_(mesh.triangles()), arc_(mesh.arc())
  {
    alive_.assign(leaves_.size(), true);
    for (const auto &e : mesh.boundary_edges())
    {
      boundary_tag_[edge_key(e.a, e.b)] = e.tag;
      roots_.push_back(e);
    }
  }

  void run_level(const std::function<bool(Point2, Point2, Point2)> &mark)
  {
    const std::size_t n = leaves_.size();
    for (std::size_t t = 0; t < n; ++t)
    {
      if (!alive_[t])
      {
        continue;
      }
      const auto &tri = leaves_[t];
      if (mark(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]))
      {
        red_split(t);
      }
    }
    close_red();
  }

  TriMesh finish()
  {
    std::vector<Triangle> out;
    out.reserve(leaves_.size());
    for (std::size_t t = 0; t < leaves_.size(); ++t)
    {
      if (!alive_[t])
      {
        continue;
      }
      const auto tri = leaves_[t];
      int hanging_local = -1;
      for (int k = 0; k < 3; ++k)
      {
        if (mid_.count(edge_key(tri[k], tri[(k + 1) % 3])))
        {
          hanging_local = k;
        }
      }
      if (hanging_local < 0)
      {
        out.push_back(tri);
        continue;
      }
      const int a = tri[hanging_local];
      const int b = tri[(hanging_local + 1) % 3];
      const int c = tri[(hanging_local + 2) % 3];
      const int m = mid_.at(edge_key(a, b));
      out.push_back({a, m, c});
      out.push_back({m, b, c});
    }
    std::vector<BoundaryEdge> boundary;
    for (const auto &e : roots_)
    {
      split_boundary(e.a, e.b, e.tag, boundary);
    }
    return TriMesh(std::move(nodes_), std::move(out), std::move(boundary), arc_);
  }

private:
  int midpoint_node(int a, int b)
  {
    const auto key = edge_key(a, b);
    if (auto it = mid_.find(key); it != mid_.end())
    {
      return it->second;
    }
    Point2 m = midpoint(nodes_[a], nodes_[b]);
    const auto tag_it = boundary_tag_.find(key);
    if (tag_it != boundary_tag_.end())
    {
      const int tag = tag_it->second;
      if (tag == kTruncationArc && arc_)
      {
        const Point2 d = m - arc_->center;
        m = arc_->center + (arc_->radius / norm(d)) * d;
      }
      boundary_tag_[edge_key(a, static_cast<int>(nodes_.size()))] = tag;
      boundary_tag_[edge_key(static_cast<int>(nodes_.size()), b)] = tag;
    }
    nodes_.push_back(m);
    const int id = static_cast<int>(nodes_.size()) - 1;
    mid_.emplace(key, id);
    return id;
  }

  void red_split(std::size_t t)
  {
    const auto [a, b, c] = leaves_[t];
    const int ab = midpoint_node(a, b);
    const int bc = midpoint_node(b, c);
    const int ca = midpoint_node(c, a);
    alive_[t] = false;
    leaves_.push_back({a, ab, ca});
    leaves_.push_back({ab, b, bc});
    leaves_.push_back({ca, bc, c});
    leaves_.push_back({ab, bc, ca});
    alive_.insert(alive_.end(), 4, true);
  }

  bool needs_closure(const Triangle &tri) const
  {
    int hanging = 0;
    for (int k = 0; k < 3; ++k)
    {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      const auto it = mid_.find(edge_key(a, b));
      if (it == mid_.end())
      {
        continue;
      }
      ++hanging;
      if (mid_.count(edge_key(a, it->second)) || mid_.count(edge_key(it->second, b)))
      {
        return true;
      }
    }
    return hanging >= 2;
  }

  void close_red()
  {
    bool changed = true;
    while (changed)
    {
      changed = false;
      const std::size_t n = leaves_.size();
      for (std::size_t t = 0; t < n; ++t)
      {
        if (alive_[t] && needs_closure(leaves_[t]))
        {
          red_split(t);
          changed = true;
        }
      }
    }
  }

  void split_boundary(int a, int b, int tag, std::vector<BoundaryEdge> &out) const
  {
    const auto it = mid_.find(edge_key(a, b));
    if (it == mid_.end())
    {
      out.push_back({a, b, tag});
      return;
    }
    split_boundary(a, it->second, tag, out);
    split_boundary(it->second, b, tag, out);
  }

  std::vector<Point2> nodes_;
  std::vector<Triangle> leaves_;
  std::vector<bool> alive_;
  std::optional<ArcBoundary> arc_;
  std::unordered_map<std::uint64_t, int> mid_;
  std::unordered_map<std::uint64_t, int> boundary_tag_;
  std::vector<BoundaryEdge> roots_;
};

}  // namespace

TriMesh::TriMesh(std::vector<Point2> nodes, std::vector<Triangle> triangles,
                 std::vector<BoundaryEdge> boundary, std::optional<ArcBoundary> arc)
  : nodes_(std::move(nodes)),
    triangles_(std::move(triangles)),
    boundary_(std::move(boundary)),
    arc_(arc)
{
  const int n = static_cast<int>(nodes_.size());
  h_min_ = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < triangles_.size(); ++t)
  {
    const auto &tri = triangles_[t];
    for (int k = 0; k < 3; ++k)
    {
      if (tri[k] < 0 || tri[k] >= n)
      {
        throw InvalidInput("triangle references a missing node");
      }
    }
    if (triangle_area(t) <= 0.0)
    {
      throw DegenerateTriangle("triangle " + std::to_string(t) +
                               " is degenerate or clockwise");
    }
    for (int k = 0; k < 3; ++k)
    {
      const double len = distance(nodes_[tri[k]], nodes_[tri[(k + 1) % 3]]);
      h_max_ = std::max(h_max_, len);
      h_min_ = std::min(h_min_, len);
    }
  }
  if (triangles_.empty())
  {
    h_min_ = 0.0;
  }
}

double TriMesh::triangle_area(std::size_t t) const
{
  const auto &tri = triangles_[t];
  return 0.5 * orient(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]);
}

double TriMesh::area() const
{
  double a = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t)
  {
    a += triangle_area(t);
  }
  return a;
}

Point2 TriMesh::centroid(std::size_t t) const
{
  const auto &tri = triangles_[t];
  return (1.0 / 3.0) * (nodes_[tri[0]] + nodes_[tri[1]] + nodes_[tri[2]]);
}

std::optional<std::size_t> TriMesh::find_node(Point2 p) const
{
  const double tol = 1e-10 * std::max(h_max_, 1e-300);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
  {
    if (distance(nodes_[i], p) <= tol)
    {
      return i;
    }
  }
  return std::nullopt;
}

TriMesh ear_clip(const Polygon &polygon)
{
  const auto &v = polygon.vertices();
  std::vector<int> ring(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    ring[i] = static_cast<int>(i);
  }
  std::vector<Triangle> tris;
  while (ring.size() > 3)
  {
    bool clipped = false;
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m && !clipped; ++i)
    {
      const int ip = ring[(i + m - 1) % m];
      const int ic = ring[i];
      const int in = ring[(i + 1) % m];
      if (orient(v[ip], v[ic], v[in]) <= 0)
      {
        continue;
      }
      bool empty = true;
      for (const int j : ring)
      {
        if (j == ip || j == ic || j == in)
        {
          continue;
        }
        if (orient(v[ip], v[ic], v[j]) >= 0 && orient(v[ic], v[in], v[j]) >= 0 &&
            orient(v[in], v[ip], v[j]) >= 0)
        {
          empty = false;
          break;
        }
      }
      if (empty)
      {
        tris.push_back({ip, ic, in});
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
        clipped = true;
      }
    }
    if (!clipped)
    {
      throw NonSimplePolygon("ear clipping found no ear");
    }
  }
  tris.push_back({ring[0], ring[1], ring[2]});

  std::vector<BoundaryEdge> boundary;
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i)
  {
    boundary.push_back({i, (i + 1) % n, i});
  }
  return TriMesh(v, std::move(tris), std::move(boundary));
}

TriMesh refine_marked(const TriMesh &mesh, const RefineMarker &mark, int levels)
{
  if (levels <= 0)
  {
    return mesh;
  }
  Refiner refiner(mesh);
  for (int level = 1; level <= levels; ++level)
  {
    refiner.run_level(
        [&](Point2 a, Point2 b, Point2 c) { return mark(level, a, b, c); });
  }
  return refiner.finish();
}

TriMesh refine_uniform(const TriMesh &mesh)
{
  return refine_marked(mesh, [](int, Point2, Point2, Point2) { return true; }, 1);
}

TriMesh triangulate(const Polygon &polygon, double h_target)
{
  if (!(h_target > 0.0))
  {
    throw InvalidInput("h_target must be positive");
  }
  TriMesh mesh = ear_clip(polygon);
  while (mesh.h_max() > h_target * (1.0 + 1e-12))
  {
    mesh = refine_uniform(mesh);
  }
  return mesh;
}

TriMesh refine_near_vertex(const TriMesh &mesh, Point2 vertex, double radius, int levels)
{
  if (!mesh.find_node(vertex))
  {
    throw VertexNotInMesh("refinement centre is not a mesh node");
  }
  return refine_marked(
      mesh,
      [&](int, Point2 a, Point2 b, Point2 c) {
        return point_triangle_distance(vertex, a, b, c) <= radius;
      },
      levels);
}

TriMesh sector_mesh(const SectorSpec &spec, double h_target)
{
  spec.validate();
  if (!(h_target > 0.0))
  {
    throw InvalidInput("h_target must be positive");
  }
  const int segments =
      std::max(1, static_cast<int>(std::ceil(spec.alpha / (std::numbers::pi / 4) - 1e-12)));
  std::vector<Point2> nodes{{0.0, 0.0}};
  for (int k = 0; k <= segments; ++k)
  {
    const double theta = spec.alpha * k / segments;
    if (k == segments)
    {
      nodes.push_back({spec.radius * std::cos(spec.alpha), spec.radius * std::sin(spec.alpha)});
    }
    else
    {
      nodes.push_back({spec.radius * std::cos(theta), spec.radius * std::sin(theta)});
    }
  }
  std::vector<Triangle> tris;
  std::vector<BoundaryEdge> boundary{{0, 1, 0}};
  for (int k = 1; k <= segments; ++k)
  {
    tris.push_back({0, k, k + 1});
    boundary.push_back({k, k + 1, kTruncationArc});
  }
  boundary.push_back({segments + 1, 0, 1});
  TriMesh mesh(std::move(nodes), std::move(tris), std::move(boundary),
               ArcBoundary{{0.0, 0.0}, spec.radius});
  while (mesh.h_max() > h_target * (1.0 + 1e-12))
  {
    mesh = refine_uniform(mesh);
  }
  return mesh;
}

TriMesh graded_sector_mesh(const SectorSpec &spec, double h_coarse, double h_apex,
                           double fine_radius)
{
  TriMesh mesh = sector_mesh(spec, h_coarse);
  const double start = mesh.h_max();
  int levels = 0;
  while (start / std::pow(2.0, levels) > h_apex)
  {
    ++levels;
  }
  const Point2 apex{0.0, 0.0};
  return refine_marked(
      mesh,
      [&](int level, Point2 a, Point2 b, Point2 c) {
        const double size = start / std::pow(2.0, level - 1);
        return point_triangle_distance(apex, a, b, c) <= fine_radius + 3.0 * size;
      },
      levels);
}

EdgeAudit audit_edges(const TriMesh &mesh)
{
  std::unordered_map<std::uint64_t, int> incidence;
  for (const auto &tri : mesh.triangles())
  {
    for (int k = 0; k < 3; ++k)
    {
      ++incidence[edge_key(tri[k], tri[(k + 1) % 3])];
    }
  }
  std::unordered_map<std::uint64_t, int> tagged;
  for (const auto &e : mesh.boundary_edges())
  {
    ++tagged[edge_key(e.a, e.b)];
  }
  EdgeAudit audit;
  for (const auto &[key, count] : incidence)
  {
    if (count == 2)
    {
      ++audit.interior_edges;
    }
    else if (count == 1)
    {
      ++audit.boundary_edges;
      if (!tagged.count(key))
      {
        ++audit.untagged_boundary;
      }
    }
    else
    {
      ++audit.bad_edges;
    }
  }
  for (const auto &[key, count] : tagged)
  {
    const auto it = incidence.find(key);
    if (count != 1 || it == incidence.end() || it->second != 1)
    {
      ++audit.stray_tags;
    }
  }
  // A hanging node sits at the midpoint of some boundary-incidence edge.
  const auto &nodes = mesh.nodes();
  std::map<std::pair<long long, long long>, int> by_position;
  const double q = 1e-9 * std::max(mesh.h_min(), 1e-300);
  for (std::size_t i = 0; i < nodes.size(); ++i)
  {
    by_position[{std::llround(nodes[i].x / q), std::llround(nodes[i].y / q)}] =
        static_cast<int>(i);
  }
  for (const auto &[key, count] : incidence)
  {
    if (count != 1)
    {
      continue;
    }
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffULL);
    const Point2 m = midpoint(nodes[a], nodes[b]);
    if (by_position.count({std::llround(m.x / q), std::llround(m.y / q)}))
    {
      ++audit.hanging_nodes;
    }
  }
  return audit;
}

}  // namespace nlsgs
