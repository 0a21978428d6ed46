#include "nlsgs/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nlsgs/errors.hpp"

namespace nlsgs {

namespace {

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d)
{
  const double d1 = orient(c, d, a);
  const double d2 = orient(c, d, b);
  const double d3 = orient(a, b, c);
  const double d4 = orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
  {
    return true;
  }
  auto on_segment = [](Point2 p, Point2 q, Point2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  return (d1 == 0 && on_segment(c, d, a)) || (d2 == 0 && on_segment(c, d, b)) ||
         (d3 == 0 && on_segment(a, b, c)) || (d4 == 0 && on_segment(a, b, d));
}

}  // namespace

double signed_area(const std::vector<Point2> &loop)
{
  double twice = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
  {
    twice += cross(loop[i], loop[(i + 1) % loop.size()]);
  }
  return 0.5 * twice;
}

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices))
{
  const std::size_t n = vertices_.size();
  if (n < 3)
  {
    throw InvalidInput("polygon needs at least 3 vertices");
  }
  for (const auto &v : vertices_)
  {
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
    {
      throw InvalidInput("polygon vertex is not finite");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    if (vertices_[i] == vertices_[(i + 1) % n])
    {
      throw DegenerateAngle("polygon has repeated consecutive vertices");
    }
  }
  // Non-adjacent edges must not touch.
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = i + 1; j < n; ++j)
    {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent)
      {
        continue;
      }
      if (segments_intersect(vertices_[i], vertices_[(i + 1) % n], vertices_[j],
                             vertices_[(j + 1) % n]))
      {
        throw NonSimplePolygon("polygon edges " + std::to_string(i) + " and " +
                               std::to_string(j) + " intersect");
      }
    }
  }
  if (signed_area(vertices_) <= 0.0)
  {
    throw NonSimplePolygon("polygon must be counter-clockwise with positive area");
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    const Point2 prev = vertices_[(i + n - 1) % n];
    const Point2 next = vertices_[(i + 1) % n];
    const double c = cross(vertices_[i] - prev, next - vertices_[i]);
    const double scale = norm(vertices_[i] - prev) * norm(next - vertices_[i]);
    if (std::abs(c) <= 1e-14 * scale)
    {
      throw DegenerateAngle("polygon vertex " + std::to_string(i) +
                            " has internal angle 0 or pi");
    }
  }
}

double Polygon::area() const { return signed_area(vertices_); }

double Polygon::internal_angle(std::size_t i) const
{
  const std::size_t n = vertices_.size();
  const Point2 to_prev = vertices_[(i + n - 1) % n] - vertices_[i];
  const Point2 to_next = vertices_[(i + 1) % n] - vertices_[i];
  // Counter-clockwise polygon: interior lies to the left when walking next -> prev.
  double a = std::atan2(cross(to_next, to_prev), dot(to_next, to_prev));
  if (a < 0)
  {
    a += 2 * std::numbers::pi;
  }
  return a;
}

AngleAtVertex smallest_angle(const Polygon &polygon)
{
  AngleAtVertex best{polygon.internal_angle(0), 0};
  for (std::size_t i = 1; i < polygon.size(); ++i)
  {
    const double a = polygon.internal_angle(i);
    if (a < best.angle)
    {
      best = {a, i};
    }
  }
  return best;
}

void SectorSpec::validate() const
{
  if (!(alpha > 0.0 && alpha < 2 * std::numbers::pi))
  {
    throw InvalidInput("sector angle must lie in (0, 2*pi)");
  }
  if (!(radius > 0.0) || !std::isfinite(radius))
  {
    throw InvalidInput("sector radius must be finite and positive");
  }
}

namespace builtin {

Polygon unit_square() { return Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

Polygon equilateral()
{
  return Polygon({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
}

Polygon right345() { return Polygon({{0, 0}, {4, 0}, {4, 3}}); }

}  // namespace builtin

Polygon load_polygon(const std::string &spec)
{
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0)
  {
    const std::string name = spec.substr(prefix.size());
    if (name == "square")
    {
      return builtin::unit_square();
    }
    if (name == "equilateral")
    {
      return builtin::equilateral();
    }
    if (name == "right345")
    {
      return builtin::right345();
    }
    throw InvalidInput("unknown builtin polygon '" + name + "'");
  }
  std::ifstream in(spec);
  if (!in)
  {
    throw InvalidInput("cannot open polygon file '" + spec + "'");
  }
  std::vector<Point2> vertices;
  std::string line;
  while (std::getline(in, line))
  {
    if (const auto hash = line.find('#'); hash != std::string::npos)
    {
      line.erase(hash);
    }
    std::istringstream ls(line);
    Point2 p;
    if (ls >> p.x >> p.y)
    {
      vertices.push_back(p);
    }
  }
  return Polygon(std::move(vertices));
}

}  // namespace nlsgs
