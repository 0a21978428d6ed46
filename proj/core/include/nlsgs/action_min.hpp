#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nlsgs/fem.hpp"
#include "nlsgs/soliton.hpp"
#include "nlsgs/starts.hpp"

namespace nlsgs {

struct ActionParams
{
  /// Stop when ||g||_{P^-1} <= tol * ||u||_P, with P = S + lambda M.
  double tol = 1e-9;
  int max_iter = 4000;
  double armijo = 1e-4;
  /// First trial step of every start (the natural step is 1).
  double step0 = 1.0;
  double step_min = 1e-12;
  /// Relative level window defining the mass envelope.
  double envelope_window = 1e-6;
  double cg_tol = 1e-12;

  void validate() const;
};

struct ActionState
{
  Field field;
  double lambda = 0.0;
  double level = 0.0;
  double mass = 0.0;
  double nehari_residual = 0.0;
  /// ||g||_{P^-1} / ||u||_P at the final iterate.
  double gradient_residual = 0.0;
  /// Component of the gradient orthogonal to the Nehari normal, relative.
  double angle_residual = 0.0;
  std::string start_label;
  int iterations = 0;
};

struct MassEnvelope
{
  double lambda = 0.0;
  double window = 0.0;
  /// Sorted masses of converged states with level <= best * (1 + window).
  std::vector<double> masses;
};

struct ActionResult
{
  MassEnvelope envelope;
  ActionState best;
  /// Every converged state, in start order.
  std::vector<ActionState> converged;
  std::size_t starts_total = 0;
};

/// |D + lambda M - L| / L for D = ||grad u||^2, M = ||u||^2, L = ||u||_p^p.
double nehari_residual(const Field &u, double lambda, double p);

/// sigma u with sigma = ((D + lambda M) / L)^{1/(p-2)}. Throws ZeroField.
Field nehari_project(const Field &u, double lambda, double p);

/// Projected descent from every start (in parallel). Throws NonPositiveLambda
/// or NoStartConverged.
ActionResult minimize_action(const std::vector<LabeledStart> &starts, double lambda, double p,
                             const ActionParams &params = {});

/// (min, max) of the envelope masses.
std::pair<double, double> mass_of_action_gs(const MassEnvelope &envelope);

/// Constant, one frequency-lambda soliton bump per mesh corner and three
/// seeded random fields, each projected onto the Nehari manifold.
std::vector<LabeledStart> default_action_starts(std::shared_ptr<const FemSpace> space, double p,
                                                double lambda, const SolitonProfile &profile,
                                                std::uint64_t seed = 1);

}  // namespace nlsgs
