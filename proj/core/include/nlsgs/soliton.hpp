#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "nlsgs/fem.hpp"
#include "nlsgs/geometry.hpp"

namespace nlsgs {

/// Radial samples of the positive decaying solution of
///   f'' + f'/r - f + f^{p-1} = 0,  f'(0) = 0,
/// on a uniform grid r_k = k * dr. Beyond r_max the profile is zero.
struct SolitonProfile
{
  double p = 4.0;
  double f0 = 0.0;
  double mass = 0.0;  ///< 2 pi int f^2 r dr
  double r_max = 0.0;
  double dr = 0.0;
  /// Radius where the integrated trajectory hands over to the C K_0(r) tail.
  double r_tail = 0.0;
  std::vector<double> f;
  std::vector<double> df;

  /// Cubic Hermite interpolation of f; zero for r >= r_max.
  double value(double r) const;
  double radius(std::size_t k) const { return dr * static_cast<double>(k); }
};

struct ShootingOptions
{
  /// Relative bisection tolerance on f(0); 0 bisects down to adjacent doubles.
  double tol = 0.0;
  /// Maximal Runge-Kutta step during the bisection.
  double max_step = 1e-2;
  /// Local error tolerance of the step-doubling RK4 integrator.
  double ode_tol = 1e-13;
  double bracket_lo = 1.0;
  double bracket_hi = 10.0;
  /// Output sample spacing.
  double dr = 1e-3;
  /// The profile ends where f <= tail_floor * f(0).
  double tail_floor = 1e-8;
};

/// Shooting with bisection on f(0) over [bracket_lo, bracket_hi]: trajectories
/// that cross zero start too high, those that turn upwards start too low.
/// Throws BisectionFailed when the bracket does not straddle the soliton.
SolitonProfile shoot_soliton(double p, const ShootingOptions &options = {});

/// Largest |f'' + f'/r - f + f^{p-1}| over interior samples (fourth-order
/// finite differences for f'').
double ode_residual(const SolitonProfile &profile);

/// Nodal interpolant of lambda^{1/(p-2)} f(sqrt(lambda) |x - center|).
Field soliton_field(const SolitonProfile &profile, double lambda, Point2 center,
                    std::shared_ptr<const FemSpace> space);

/// Cached p = 4 profile (computed on first use, thread-safe).
const SolitonProfile &townes_profile();

/// Cached profile for any admissible p (computed once per exponent, thread-safe).
const SolitonProfile &soliton_profile(double p);

/// Critical mass of the plane: mass of the p = 4 soliton.
double mu_bar();
/// Best Gagliardo-Nirenberg constant of the plane, 2 / mu_bar.
double gn_constant_k2();

/// Critical mass of the sector of angle alpha:
/// alpha/(2 pi) mu_bar for alpha <= pi, mu_bar/2 for alpha in (pi, 2 pi).
double critical_mass(double alpha, double mu_bar_value);
double critical_mass(double alpha);

/// Mass of the soliton of frequency lambda restricted to a sector of angle
/// alpha <= pi (any p): (alpha / 2 pi) m_p lambda^{2/(p-2) - 1}.
double sector_soliton_mass(const SolitonProfile &profile, double alpha, double lambda);

void write_profile_csv(std::ostream &out, const SolitonProfile &profile, std::size_t stride = 1);

}  // namespace nlsgs
