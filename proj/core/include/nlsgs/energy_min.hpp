#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "nlsgs/fem.hpp"
#include "nlsgs/soliton.hpp"
#include "nlsgs/starts.hpp"

namespace nlsgs {

struct FlowParams
{
  /// Initial pseudo-time step; adapted during the run.
  double tau = 1e-2;
  double tau_min = 1e-10;
  double tau_max = 1e2;
  double tol_residual = 1e-8;
  int max_steps = 20000;
  double blowup_energy = -1e6;
  double blowup_gradnorm = 1e8;
  /// Mesh-relative blow-up threshold: ||grad u||^2 above mu / (factor * h_min)^2
  /// and above four times its value at the start counts as blow-up. Zero
  /// disables it.
  double blowup_mesh_factor = 4.0;
  double cg_tol = 1e-12;

  void validate() const;
};

struct GroundState
{
  Field field;
  double level = 0.0;
  double mass = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  std::string start_label;
  int iterations = 0;
};

/// The energy is unbounded below: some trajectory crossed a blow-up threshold.
struct Unbounded
{
  std::string start_label;
  int step = 0;
  double energy = 0.0;
  double gradnorm = 0.0;
};

using EnergyResult = std::variant<GroundState, Unbounded>;

/// Pseudo-time step of size tau:
///   (M/tau + S + lambda_+ M) v = M u / tau + N(u),  lambda_+ = max(lambda_u, 0),
/// followed by rescaling v to mass mu.
Field flow_step(const Field &u, double p, double mu, double tau, double cg_tol = 1e-12);
Field flow_step(const Field &u, double p, double mu, const FlowParams &params);

/// Runs the flow from every start (in parallel) and returns the lowest-level
/// converged state, or Unbounded if any trajectory blows up. When `log` is
/// given, one JSON object per accepted step is written to it, in start order.
EnergyResult minimize_energy(const std::vector<LabeledStart> &starts, double p, double mu,
                             const FlowParams &params = {}, std::ostream *log = nullptr);

/// Constant, one soliton bump per mesh corner, and three seeded random
/// perturbations of the constant; all with mass mu.
std::vector<LabeledStart> default_starts(std::shared_ptr<const FemSpace> space, double p,
                                         double mu, const SolitonProfile &profile,
                                         std::uint64_t seed = 1);

}  // namespace nlsgs
