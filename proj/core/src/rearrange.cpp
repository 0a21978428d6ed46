#include "nlsgs/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "nlsgs/errors.hpp"

namespace nlsgs {

namespace {

struct Cell
{
  double value;
  double area;
};

std::vector<Cell> cells_of(const Field &u, RearrangeCells kind)
{
  const auto &mesh = u.mesh();
  const auto vals = u.values();
  const auto &quad = u.space().quadrature();
  std::vector<Cell> cells;
  cells.reserve(mesh.triangle_count() * quad.weights.size());
  for (std::size_t e = 0; e < mesh.triangle_count(); ++e)
  {
    const auto &tri = mesh.triangles()[e];
    const double area = mesh.triangle_area(e);
    const double u0 = vals[tri[0]];
    const double u1 = vals[tri[1]];
    const double u2 = vals[tri[2]];
    if (kind == RearrangeCells::TriangleAverage)
    {
      cells.push_back({std::abs(u0 + u1 + u2) / 3.0, area});
      continue;
    }
    for (std::size_t q = 0; q < quad.weights.size(); ++q)
    {
      const auto &b = quad.points[q];
      cells.push_back({std::abs(b[0] * u0 + b[1] * u1 + b[2] * u2), quad.weights[q] * area});
    }
  }
  return cells;
}

}  // namespace

double RadialProfile::area() const
{
  const double r = outer_radius();
  return 0.5 * alpha_eff * r * r;
}

double RadialProfile::value_at(double r) const
{
  if (r < 0.0 || values.empty() || r >= radii.back())
  {
    return r < 0.0 && !values.empty() ? values.front() : 0.0;
  }
  const auto it = std::upper_bound(radii.begin(), radii.end(), r);
  return values[static_cast<std::size_t>(it - radii.begin()) - 1];
}

double RadialProfile::lr_integral(double r) const
{
  double total = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
  {
    const double layer = 0.5 * alpha_eff * (radii[k + 1] * radii[k + 1] - radii[k] * radii[k]);
    total += std::pow(values[k], r) * layer;
  }
  return total;
}

double RadialProfile::annulus_mean(double r0, double r1) const
{
  r1 = std::min(r1, outer_radius());
  if (!(r1 > r0))
  {
    return 0.0;
  }
  auto k = static_cast<std::size_t>(std::upper_bound(radii.begin(), radii.end(), r0) -
                                    radii.begin());
  k = k == 0 ? 0 : k - 1;
  double integral = 0.0;
  for (; k < values.size() && radii[k] < r1; ++k)
  {
    const double a = std::max(radii[k], r0);
    const double b = std::min(radii[k + 1], r1);
    if (b > a)
    {
      integral += values[k] * (b * b - a * a);
    }
  }
  return integral / (r1 * r1 - r0 * r0);
}

RadialProfile rearrange_to_sector(const Field &u, double alpha, RearrangeCells kind)
{
  if (!(alpha > 0.0 && alpha <= 2 * std::numbers::pi))
  {
    throw InvalidInput("rearrangement angle must lie in (0, 2*pi]");
  }
  auto cells = cells_of(u, kind);
  std::stable_sort(cells.begin(), cells.end(),
                   [](const Cell &a, const Cell &b) { return a.value > b.value; });
  RadialProfile prof;
  prof.alpha = alpha;
  prof.alpha_eff = std::min(alpha, std::numbers::pi);
  prof.radii.push_back(0.0);
  double s = 0.0;
  for (const auto &c : cells)
  {
    s += c.area;
    const double r = std::sqrt(2.0 * s / prof.alpha_eff);
    if (!prof.values.empty() && prof.values.back() == c.value)
    {
      prof.radii.back() = r;
      continue;
    }
    prof.values.push_back(c.value);
    prof.radii.push_back(r);
  }
  return prof;
}

double profile_dirichlet(const RadialProfile &profile, std::size_t bins)
{
  if (profile.values.empty() || bins < 2)
  {
    return 0.0;
  }
  const double R = profile.outer_radius();
  const double w = R / static_cast<double>(bins);
  std::vector<double> mean(bins);
  std::vector<double> centre(bins);
  for (std::size_t j = 0; j < bins; ++j)
  {
    const double a = w * static_cast<double>(j);
    mean[j] = profile.annulus_mean(a, a + w);
    centre[j] = a + 0.5 * w;
  }
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < bins; ++j)
  {
    const double slope = (mean[j + 1] - mean[j]) / w;
    total += slope * slope * profile.alpha_eff * (centre[j] + 0.5 * w) * w;
  }
  return total;
}

PolyaSzegoReport audit_polya_szego(const Field &u, double alpha, std::size_t bins)
{
  const auto prof = rearrange_to_sector(u, alpha);
  if (bins == 0)
  {
    const double h = u.mesh().h_max();
    bins = static_cast<std::size_t>(
        std::clamp(std::ceil(2.0 * prof.outer_radius() / h), 16.0, 4000.0));
  }
  PolyaSzegoReport rep;
  rep.l2 = std::sqrt(mass(u));
  rep.l2_star = std::sqrt(prof.lr_integral(2.0));
  rep.l4 = std::pow(lp_integral(u, 4.0), 0.25);
  rep.l4_star = std::pow(prof.lr_integral(4.0), 0.25);
  rep.grad = std::sqrt(dirichlet(u));
  rep.grad_star = std::sqrt(profile_dirichlet(prof, bins));
  return rep;
}

Field profile_field(const RadialProfile &profile, std::shared_ptr<const FemSpace> space,
                    Point2 apex)
{
  const auto &nodes = space->mesh().nodes();
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
  {
    const double r = distance(nodes[i], apex);
    v[i] = r < profile.outer_radius() ? profile.value_at(r)
                                      : (profile.values.empty() ? 0.0 : profile.values.back());
  }
  return Field(std::move(space), std::move(v));
}

void write_radial_profile_csv(std::ostream &out, const RadialProfile &profile)
{
  out << std::setprecision(17);
  out << "# alpha=" << profile.alpha << " alpha_eff=" << profile.alpha_eff << '\n';
  out << "r,value\n";
  for (std::size_t k = 0; k < profile.values.size(); ++k)
  {
    out << profile.radii[k] << ',' << profile.values[k] << '\n';
  }
}

}  // namespace nlsgs
