#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace nlsgs {

struct Point2
{
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 midpoint(Point2 a, Point2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

/// Twice the signed area of (a, b, c); positive for counter-clockwise order.
inline double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

/// A simple polygon with counter-clockwise vertices. Construction validates:
/// at least three vertices, no self-intersections, positive signed area and no
/// internal angle equal to 0 or pi.
class Polygon
{
public:
  explicit Polygon(std::vector<Point2> vertices);

  const std::vector<Point2> &vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const Point2 &operator[](std::size_t i) const { return vertices_[i]; }

  double area() const;
  /// Internal angle at vertex i, in (0, 2*pi).
  double internal_angle(std::size_t i) const;

private:
  std::vector<Point2> vertices_;
};

/// Shoelace signed area of a closed vertex loop.
double signed_area(const std::vector<Point2> &loop);

struct AngleAtVertex
{
  double angle = 0.0;
  std::size_t vertex = 0;
};

/// Smallest internal angle and the lowest index achieving it.
AngleAtVertex smallest_angle(const Polygon &polygon);

/// Truncated sector {r e^{i theta} : 0 < theta < alpha, r < radius}.
struct SectorSpec
{
  double alpha = std::numbers::pi / 2;
  double radius = 1.0;

  void validate() const;
};

namespace builtin {
Polygon unit_square();
/// Equilateral triangle with unit side, vertex 0 at the origin.
Polygon equilateral();
/// Right triangle with legs 4 (along x) and 3; vertex 0 carries the angle atan(3/4).
Polygon right345();
}  // namespace builtin

/// Resolves "builtin:<name>" to a builtin polygon, otherwise reads a file with
/// one "x y" vertex per line ('#' starts a comment).
Polygon load_polygon(const std::string &spec);

}  // namespace nlsgs
