#include "nlsgs/soliton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>

#include "nlsgs/errors.hpp"

namespace nlsgs {

namespace {

using State = std::array<double, 2>;  // (f, f')

State rhs(double r, const State &y, double p)
{
  const double f = y[0];
  const double nonlinear = std::pow(std::abs(f), p - 2.0) * f;
  if (r == 0.0)
  {
    // f'/r -> f''(0), hence 2 f''(0) = f - f^{p-1}.
    return {y[1], 0.5 * (f - nonlinear)};
  }
  return {y[1], -y[1] / r + f - nonlinear};
}

State rk4(double r, const State &y, double h, double p)
{
  const State k1 = rhs(r, y, p);
  const State k2 = rhs(r + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]}, p);
  const State k3 = rhs(r + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]}, p);
  const State k4 = rhs(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]}, p);
  return {y[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
          y[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

/// Step-doubling RK4 over [r, r + span] with steps no longer than max_step.
class Integrator
{
public:
  Integrator(double p, double ode_tol, double max_step)
    : p_(p), tol_(ode_tol), max_step_(max_step), h_(max_step)
  {
  }

  State advance(double r, State y, double span)
  {
    const double end = r + span;
    while (r < end)
    {
      double h = std::min({h_, max_step_, end - r});
      for (int attempt = 0;; ++attempt)
      {
        const State full = rk4(r, y, h, p_);
        const State half = rk4(r + 0.5 * h, rk4(r, y, 0.5 * h, p_), 0.5 * h, p_);
        const double err =
            std::max(std::abs(half[0] - full[0]), std::abs(half[1] - full[1])) / 15.0;
        const double scale = std::max({std::abs(y[0]), std::abs(y[1]), 1e-300});
        if (err <= tol_ * scale || h < 1e-12)
        {
          y = {half[0] + (half[0] - full[0]) / 15.0, half[1] + (half[1] - full[1]) / 15.0};
          r += h;
          const double grow = err > 0 ? 0.9 * std::pow(tol_ * scale / err, 0.2) : 2.0;
          if (r < end)
          {
            h_ = h * std::clamp(grow, 0.2, 2.0);
          }
          break;
        }
        h *= std::clamp(0.9 * std::pow(tol_ * scale / err, 0.2), 0.1, 0.5);
        if (attempt > 200)
        {
          throw SolverFailure("radial integrator step size underflow");
        }
      }
    }
    return y;
  }

private:
  double p_;
  double tol_;
  double max_step_;
  double h_;
};

enum class Outcome
{
  Crossed,
  Turned
};

Outcome classify(double f0, double p, const ShootingOptions &opt)
{
  Integrator integ(p, opt.ode_tol, opt.max_step);
  State y{f0, 0.0};
  double r = 0.0;
  constexpr double r_limit = 60.0;
  while (r < r_limit)
  {
    y = integ.advance(r, y, opt.max_step);
    r += opt.max_step;
    if (y[0] < 0.0)
    {
      return Outcome::Crossed;
    }
    if (y[1] > 0.0)
    {
      return Outcome::Turned;
    }
  }
  return Outcome::Turned;
}

double cubic_hermite(double t, double h, double f0, double d0, double f1, double d1)
{
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f1 +
         (t3 - t2) * h * d1;
}

}  // namespace

double SolitonProfile::value(double r) const
{
  if (r < 0.0)
  {
    r = -r;
  }
  if (r >= r_max || f.size() < 2)
  {
    return 0.0;
  }
  const double x = r / dr;
  const auto k = std::min(static_cast<std::size_t>(x), f.size() - 2);
  const double t = x - static_cast<double>(k);
  return cubic_hermite(t, dr, f[k], df[k], f[k + 1], df[k + 1]);
}

SolitonProfile shoot_soliton(double p, const ShootingOptions &opt)
{
  require_exponent(p);
  double lo = opt.bracket_lo;
  double hi = opt.bracket_hi;
  if (classify(lo, p, opt) != Outcome::Turned || classify(hi, p, opt) != Outcome::Crossed)
  {
    throw BisectionFailed("f(0) bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] does not contain the soliton");
  }
  while (hi - lo > opt.tol * hi)
  {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
    {
      break;
    }
    (classify(mid, p, opt) == Outcome::Crossed ? hi : lo) = mid;
  }

  SolitonProfile prof;
  prof.p = p;
  prof.f0 = 0.5 * (lo + hi);
  prof.dr = opt.dr;

  // Sample the bracketing trajectories together until they separate or the
  // nonlinearity is negligible, then blend smoothly into the linear tail C K0(r).
  const double f_switch =
      std::max(opt.tail_floor * prof.f0, std::min(1e-3, std::pow(1e-11, 1.0 / (p - 1.0))));
  Integrator lower(p, opt.ode_tol, opt.dr);
  Integrator upper(p, opt.ode_tol, opt.dr);
  Integrator middle(p, opt.ode_tol, opt.dr);
  State ylo{lo, 0.0};
  State yhi{hi, 0.0};
  State y{prof.f0, 0.0};
  prof.f.push_back(y[0]);
  prof.df.push_back(y[1]);
  std::size_t k = 0;
  while (true)
  {
    const double r = prof.radius(k);
    ylo = lower.advance(r, ylo, opt.dr);
    yhi = upper.advance(r, yhi, opt.dr);
    const State next = middle.advance(r, y, opt.dr);
    if (std::abs(ylo[0] - yhi[0]) > 1e-6 * std::abs(next[0]) || next[0] <= 0.0 ||
        next[1] >= 0.0)
    {
      break;
    }
    y = next;
    ++k;
    prof.f.push_back(y[0]);
    prof.df.push_back(y[1]);
    if (y[0] <= f_switch)
    {
      break;
    }
  }
  if (k < 10)
  {
    throw SolverFailure("soliton trajectory separated immediately");
  }

  // Blend window: the middle trajectory stays accurate for O(1) further.
  const std::size_t start = k;
  const std::size_t window = static_cast<std::size_t>(std::llround(1.0 / opt.dr));
  std::vector<State> extension;
  for (std::size_t j = 0; j < window; ++j)
  {
    y = middle.advance(prof.radius(k + j), y, opt.dr);
    if (y[0] <= 0.0 || y[1] >= 0.0)
    {
      break;
    }
    extension.push_back(y);
  }
  const std::size_t w = extension.size();
  double num = prof.f[start] * std::cyl_bessel_k(0.0, prof.radius(start));
  double den = std::pow(std::cyl_bessel_k(0.0, prof.radius(start)), 2);
  for (std::size_t j = 0; j < w; ++j)
  {
    const double kz = std::cyl_bessel_k(0.0, prof.radius(start + j + 1));
    num += extension[j][0] * kz;
    den += kz * kz;
  }
  const double c = num / den;
  prof.r_tail = prof.radius(start);
  for (std::size_t j = 0; j < w; ++j)
  {
    const double r = prof.radius(start + j + 1);
    const double t = static_cast<double>(j + 1) / static_cast<double>(w + 1);
    const double s = t * t * t * (10 - 15 * t + 6 * t * t);
    const double ds = 30 * t * t * (1 - t) * (1 - t) / (static_cast<double>(w + 1) * opt.dr);
    const double tail = c * std::cyl_bessel_k(0.0, r);
    const double dtail = -c * std::cyl_bessel_k(1.0, r);
    prof.f.push_back((1 - s) * extension[j][0] + s * tail);
    prof.df.push_back((1 - s) * extension[j][1] + s * dtail + ds * (tail - extension[j][0]));
  }
  k = prof.f.size() - 1;
  while (prof.f.back() > opt.tail_floor * prof.f0)
  {
    ++k;
    const double r = prof.radius(k);
    prof.f.push_back(c * std::cyl_bessel_k(0.0, r));
    prof.df.push_back(-c * std::cyl_bessel_k(1.0, r));
  }
  prof.r_max = prof.radius(k);

  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < prof.f.size(); ++i)
  {
    const double g0 = prof.f[i] * prof.f[i] * prof.radius(i);
    const double g1 = prof.f[i + 1] * prof.f[i + 1] * prof.radius(i + 1);
    integral += 0.5 * prof.dr * (g0 + g1);
  }
  prof.mass = 2.0 * std::numbers::pi * integral;
  return prof;
}

double ode_residual(const SolitonProfile &prof)
{
  const double h = prof.dr;
  double worst = 0.0;
  for (std::size_t k = 2; k + 2 < prof.f.size(); ++k)
  {
    const double r = prof.radius(k);
    const double f2 = (-prof.f[k - 2] + 16 * prof.f[k - 1] - 30 * prof.f[k] + 16 * prof.f[k + 1] -
                       prof.f[k + 2]) /
                      (12 * h * h);
    const double f = prof.f[k];
    const double res = f2 + prof.df[k] / r - f + std::pow(std::abs(f), prof.p - 2.0) * f;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

Field soliton_field(const SolitonProfile &profile, double lambda, Point2 center,
                    std::shared_ptr<const FemSpace> space)
{
  if (!(lambda > 0.0))
  {
    throw InvalidInput("soliton_field: lambda must be positive");
  }
  const double amplitude = std::pow(lambda, 1.0 / (profile.p - 2.0));
  const double scale = std::sqrt(lambda);
  const auto &nodes = space->mesh().nodes();
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
  {
    v[i] = amplitude * profile.value(scale * distance(nodes[i], center));
  }
  return Field(std::move(space), std::move(v));
}

const SolitonProfile &townes_profile()
{
  static const SolitonProfile profile = shoot_soliton(4.0);
  return profile;
}

const SolitonProfile &soliton_profile(double p)
{
  if (p == 4.0)
  {
    return townes_profile();
  }
  static std::mutex guard;
  static std::map<double, std::unique_ptr<SolitonProfile>> cache;
  std::lock_guard lock(guard);
  auto &slot = cache[p];
  if (!slot)
  {
    slot = std::make_unique<SolitonProfile>(shoot_soliton(p));
  }
  return *slot;
}

double mu_bar() { return townes_profile().mass; }

double gn_constant_k2() { return 2.0 / mu_bar(); }

double critical_mass(double alpha, double mu_bar_value)
{
  if (!(alpha > 0.0 && alpha < 2 * std::numbers::pi))
  {
    throw InvalidInput("critical_mass: angle must lie in (0, 2*pi)");
  }
  if (alpha <= std::numbers::pi)
  {
    return alpha / (2 * std::numbers::pi) * mu_bar_value;
  }
  return 0.5 * mu_bar_value;
}

double critical_mass(double alpha) { return critical_mass(alpha, mu_bar()); }

double sector_soliton_mass(const SolitonProfile &profile, double alpha, double lambda)
{
  const double a = std::min(alpha, 2 * std::numbers::pi);
  return a / (2 * std::numbers::pi) * profile.mass *
         std::pow(lambda, 2.0 / (profile.p - 2.0) - 1.0);
}

void write_profile_csv(std::ostream &out, const SolitonProfile &profile, std::size_t stride)
{
  out << std::setprecision(17);
  out << "# p=" << profile.p << " f0=" << profile.f0 << " mass=" << profile.mass << '\n';
  out << "r,f\n";
  stride = std::max<std::size_t>(stride, 1);
  for (std::size_t k = 0; k < profile.f.size(); k += stride)
  {
    out << profile.radius(k) << ',' << profile.f[k] << '\n';
  }
}

}  // namespace nlsgs
