#include "nlsgs/energy_min.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "nlsgs/errors.hpp"
#include "nlsgs/parallel.hpp"

namespace nlsgs {

namespace {

struct State
{
  Field u;
  std::vector<double> su;
  std::vector<double> mu;
  std::vector<double> load;
  double grad2 = 0.0;
  double mass = 0.0;
  double lp = 0.0;
  double lambda = 0.0;
  double energy = 0.0;
};

State evaluate(Field u, double p)
{
  State s;
  s.su = matvec(u.space().stiffness(), u.values());
  s.mu = matvec(u.space().mass(), u.values());
  s.load = nonlinear_load(u, p);
  s.grad2 = dot(u.values(), s.su);
  s.mass = dot(u.values(), s.mu);
  s.lp = lp_integral(u, p);
  if (!(s.mass > 0.0))
  {
    throw ZeroMass("flow iterate has zero mass");
  }
  s.lambda = (s.lp - s.grad2) / s.mass;
  s.energy = 0.5 * s.grad2 - s.lp / p;
  s.u = std::move(u);
  return s;
}

double residual(const State &s)
{
  std::vector<double> r(s.su.size());
  for (std::size_t i = 0; i < r.size(); ++i)
  {
    r[i] = s.su[i] + s.lambda * s.mu[i] - s.load[i];
  }
  return dual_norm(s.u.space(), r);
}

Field step_from(const State &s, double mu, double tau, double cg_tol)
{
  const auto &space = s.u.space();
  const double shift = std::max(s.lambda, 0.0);
  const SparseSym a = space.shifted(1.0 / tau + shift);
  std::vector<double> rhs(s.mu.size());
  for (std::size_t i = 0; i < rhs.size(); ++i)
  {
    rhs[i] = s.mu[i] / tau + s.load[i];
  }
  CgOptions opt;
  opt.tol = cg_tol;
  opt.x0 = s.u.values();
  std::vector<double> v;
  try
  {
    v = solve_cg(a, rhs, 0.0, opt);
  }
  catch (const SolverFailure &e)
  {
    throw LinearSolveFailed(std::string("flow step: ") + e.what());
  }
  Field out(s.u.space_ptr(), std::move(v));
  return rescale_to_mass(out, mu);
}

struct Trajectory
{
  std::optional<GroundState> state;
  std::optional<Unbounded> blowup;
  std::string log;
};

Trajectory run_flow(const LabeledStart &start, double p, double mu, const FlowParams &params,
                    bool want_log)
{
  Trajectory out;
  std::ostringstream log;
  const auto &mesh = start.field.mesh();
  State s = evaluate(rescale_to_mass(start.field, mu), p);
  double grad_limit = params.blowup_gradnorm;
  if (params.blowup_mesh_factor > 0.0)
  {
    const double mesh_limit = mu / std::pow(params.blowup_mesh_factor * mesh.h_min(), 2);
    grad_limit = std::min(grad_limit, std::max(mesh_limit, 4.0 * s.grad2));
  }
  double tau = params.tau;
  for (int step = 0; step <= params.max_steps; ++step)
  {
    const double res = residual(s);
    if (want_log)
    {
      nlohmann::json j{{"start", start.label},
                       {"step", step},
                       {"energy", s.energy},
                       {"residual", res},
                       {"tau", tau}};
      log << j.dump() << '\n';
    }
    if (s.energy < params.blowup_energy || s.grad2 > grad_limit || !s.u.finite())
    {
      out.blowup = Unbounded{start.label, step, s.energy, s.grad2};
      break;
    }
    if (res <= params.tol_residual)
    {
      GroundState gs;
      double total = 0.0;
      for (const double v : s.u.values())
      {
        total += v;
      }
      gs.field = total < 0.0 ? s.u.scaled(-1.0) : s.u;
      gs.level = s.energy;
      gs.mass = s.mass;
      gs.lambda = s.lambda;
      gs.residual = res;
      gs.start_label = start.label;
      gs.iterations = step;
      out.state = std::move(gs);
      break;
    }
    if (step == params.max_steps)
    {
      break;
    }
    bool stalled = false;
    while (true)
    {
      State next = evaluate(step_from(s, mu, tau, params.cg_tol), p);
      if (next.energy <= s.energy + 1e-12 * std::max(1.0, std::abs(s.energy)))
      {
        s = std::move(next);
        tau = std::min(tau * 1.25, params.tau_max);
        break;
      }
      tau *= 0.5;
      if (tau < params.tau_min)
      {
        stalled = true;
        break;
      }
    }
    if (stalled)
    {
      break;
    }
  }
  out.log = log.str();
  return out;
}

}  // namespace

void FlowParams::validate() const
{
  if (!(tau > 0.0) || !(tau_min > 0.0) || !(tau_max >= tau))
  {
    throw InvalidInput("flow: need 0 < tau_min, 0 < tau <= tau_max");
  }
  if (!std::isfinite(blowup_energy) || !std::isfinite(blowup_gradnorm) || !(tol_residual > 0.0))
  {
    throw InvalidInput("flow: thresholds must be finite and the tolerance positive");
  }
  if (max_steps < 0)
  {
    throw InvalidInput("flow: max_steps must be non-negative");
  }
}

Field flow_step(const Field &u, double p, double mu, double tau, double cg_tol)
{
  require_exponent(p);
  if (!(tau > 0.0))
  {
    throw InvalidInput("flow_step: tau must be positive");
  }
  return step_from(evaluate(u, p), mu, tau, cg_tol);
}

Field flow_step(const Field &u, double p, double mu, const FlowParams &params)
{
  return flow_step(u, p, mu, params.tau, params.cg_tol);
}

EnergyResult minimize_energy(const std::vector<LabeledStart> &starts, double p, double mu,
                             const FlowParams &params, std::ostream *log)
{
  require_exponent(p);
  params.validate();
  if (starts.empty())
  {
    throw InvalidInput("minimize_energy: no starts");
  }
  if (!(mu > 0.0))
  {
    throw InvalidInput("minimize_energy: mass must be positive");
  }
  const auto runs = parallel_map<Trajectory>(starts.size(), [&](std::size_t i) {
    return run_flow(starts[i], p, mu, params, log != nullptr);
  });
  if (log)
  {
    for (const auto &r : runs)
    {
      *log << r.log;
    }
  }
  for (const auto &r : runs)
  {
    if (r.blowup)
    {
      return *r.blowup;
    }
  }
  const GroundState *best = nullptr;
  for (const auto &r : runs)
  {
    if (!r.state)
    {
      continue;
    }
    const double tie = 1e-10 * std::max(1.0, std::abs(r.state->level));
    if (!best || r.state->level < best->level - tie)
    {
      best = &*r.state;
    }
  }
  if (!best)
  {
    throw NoStartConverged("energy flow: no start reached the residual tolerance within " +
                           std::to_string(params.max_steps) + " steps");
  }
  return *best;
}

std::vector<LabeledStart> default_starts(std::shared_ptr<const FemSpace> space, double p,
                                         double mu, const SolitonProfile &profile,
                                         std::uint64_t seed)
{
  require_exponent(p);
  std::vector<LabeledStart> out;
  out.push_back({"constant", rescale_to_mass(Field::constant(space, 1.0), mu)});
  const auto corners = mesh_corners(space->mesh());
  for (std::size_t k = 0; k < corners.size(); ++k)
  {
    const double lam = corner_bump_lambda(*space, corners[k], profile, mu);
    out.push_back({"vertex-" + std::to_string(k),
                   rescale_to_mass(soliton_field(profile, lam, corners[k].point, space), mu)});
  }
  for (std::uint64_t r = 0; r < 3; ++r)
  {
    out.push_back({"random-" + std::to_string(r),
                   rescale_to_mass(random_positive_field(space, seed * 1000003ULL + r), mu)});
  }
  return out;
}

}  // namespace nlsgs
