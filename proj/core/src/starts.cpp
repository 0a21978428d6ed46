#include "nlsgs/starts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "nlsgs/errors.hpp"

namespace nlsgs {

namespace {

double angle_at(Point2 at, Point2 b, Point2 c)
{
  const Point2 u = b - at;
  const Point2 v = c - at;
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

int corner_key(const std::set<int> &tags)
{
  const int lo = *tags.begin();
  const int hi = *tags.rbegin();
  if (lo == kTruncationArc)
  {
    return 1000 + hi;
  }
  return hi - lo == 1 ? hi : 0;
}

}  // namespace

std::vector<Corner> mesh_corners(const TriMesh &mesh)
{
  std::map<int, std::set<int>> tags;
  for (const auto &e : mesh.boundary_edges())
  {
    tags[e.a].insert(e.tag);
    tags[e.b].insert(e.tag);
  }
  std::vector<Corner> out;
  for (const auto &[node, t] : tags)
  {
    if (t.size() < 2)
    {
      continue;
    }
    Corner c;
    c.node = static_cast<std::size_t>(node);
    c.point = mesh.nodes()[c.node];
    c.tag = corner_key(t);
    out.push_back(c);
  }
  for (const auto &tri : mesh.triangles())
  {
    for (int k = 0; k < 3; ++k)
    {
      for (auto &c : out)
      {
        if (static_cast<std::size_t>(tri[k]) == c.node)
        {
          c.angle += angle_at(mesh.nodes()[tri[k]], mesh.nodes()[tri[(k + 1) % 3]],
                              mesh.nodes()[tri[(k + 2) % 3]]);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Corner &a, const Corner &b) { return a.tag < b.tag; });
  return out;
}

std::pair<double, double> bump_lambda_range(const FemSpace &space, const Corner &corner)
{
  const auto &mesh = space.mesh();
  std::map<int, std::set<int>> tags;
  for (const auto &e : mesh.boundary_edges())
  {
    tags[e.a].insert(e.tag);
    tags[e.b].insert(e.tag);
  }
  const auto &own = tags[static_cast<int>(corner.node)];
  double reach = std::numeric_limits<double>::infinity();
  for (const auto &[node, t] : tags)
  {
    bool shares = false;
    for (const int tag : t)
    {
      shares = shares || own.count(tag) > 0;
    }
    if (!shares)
    {
      reach = std::min(reach, distance(mesh.nodes()[node], corner.point));
    }
  }
  if (!std::isfinite(reach))
  {
    reach = std::sqrt(space.area());
  }
  double h_local = 0.0;
  for (const auto &tri : mesh.triangles())
  {
    for (int k = 0; k < 3; ++k)
    {
      if (static_cast<std::size_t>(tri[k]) == corner.node)
      {
        h_local = std::max({h_local, distance(corner.point, mesh.nodes()[tri[(k + 1) % 3]]),
                            distance(corner.point, mesh.nodes()[tri[(k + 2) % 3]])});
      }
    }
  }
  const double lam_lo = std::pow(4.0 / reach, 2);
  return {lam_lo, std::max(lam_lo, std::pow(0.5 / h_local, 2))};
}

double corner_bump_lambda(const FemSpace &space, const Corner &corner,
                          const SolitonProfile &profile, double mu)
{
  const auto [lam_lo, lam_hi] = bump_lambda_range(space, corner);
  const double e = 2.0 / (profile.p - 2.0) - 1.0;
  double lam = 4.0 * lam_lo;
  if (e > 0.05)
  {
    const double base = sector_soliton_mass(profile, std::min(corner.angle, std::numbers::pi), 1.0);
    lam = std::pow(mu / base, 1.0 / e);
  }
  return std::clamp(lam, lam_lo, lam_hi);
}

Field random_positive_field(std::shared_ptr<const FemSpace> space, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  const auto &nodes = space->mesh().nodes();
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  std::uniform_real_distribution<double> width(0.1, 0.3);
  std::uniform_real_distribution<double> height(0.5, 3.0);
  const double scale = std::sqrt(space->area());
  std::vector<double> v(nodes.size(), 1.0);
  for (int bump = 0; bump < 3; ++bump)
  {
    const Point2 c = nodes[pick(rng)];
    const double s = width(rng) * scale;
    const double a = height(rng);
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
      const double d = distance(nodes[i], c) / s;
      v[i] += a * std::exp(-0.5 * d * d);
    }
  }
  return Field(std::move(space), std::move(v));
}

Field rescale_to_mass(const Field &u, double mu)
{
  const double m = mass(u);
  if (!(m > 0.0))
  {
    throw ZeroMass("cannot rescale a field of zero mass");
  }
  return u.scaled(std::sqrt(mu / m));
}

}  // namespace nlsgs
