#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "nlsgs/fem.hpp"

namespace nlsgs {

enum class RearrangeCells
{
  /// One cell per quadrature point (weight w_q |T|); exact for P1 fields.
  Quadrature,
  /// One cell per triangle carrying the mean of its nodal values.
  TriangleAverage
};

/// Nonincreasing step function on a sector: values[k] on [radii[k], radii[k+1]).
struct RadialProfile
{
  double alpha = 0.0;
  /// min(alpha, pi): the angle of the sector actually carrying the profile.
  double alpha_eff = 0.0;
  std::vector<double> radii;
  std::vector<double> values;

  double outer_radius() const { return radii.empty() ? 0.0 : radii.back(); }
  double area() const;
  /// Step-function value; zero beyond the outer radius.
  double value_at(double r) const;
  /// int |u*|^r over the sector.
  double lr_integral(double r) const;
  /// Mean of the profile over the annulus [r0, r1) with respect to area.
  double annulus_mean(double r0, double r1) const;
};

/// Sorts |u| over the cells by decreasing value and maps cumulative area s to
/// radius sqrt(2 s / alpha_eff).
RadialProfile rearrange_to_sector(const Field &u, double alpha,
                                  RearrangeCells cells = RearrangeCells::Quadrature);

/// ||grad u*||^2 from bin means on a uniform radial grid with `bins` bins
/// (0 picks roughly two bins per mesh size).
double profile_dirichlet(const RadialProfile &profile, std::size_t bins);

struct PolyaSzegoReport
{
  double l2 = 0.0;
  double l2_star = 0.0;
  double l4 = 0.0;
  double l4_star = 0.0;
  double grad = 0.0;
  double grad_star = 0.0;
  /// ||grad u*|| / ||grad u|| - 1; positive values violate the inequality.
  double excess() const { return grad > 0.0 ? grad_star / grad - 1.0 : 0.0; }
};

PolyaSzegoReport audit_polya_szego(const Field &u, double alpha, std::size_t bins = 0);

/// Nodal field x -> profile.value_at(|x - apex|).
Field profile_field(const RadialProfile &profile, std::shared_ptr<const FemSpace> space,
                    Point2 apex = {});

void write_radial_profile_csv(std::ostream &out, const RadialProfile &profile);

}  // namespace nlsgs
