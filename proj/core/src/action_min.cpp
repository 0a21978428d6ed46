#include "nlsgs/action_min.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "nlsgs/errors.hpp"
#include "nlsgs/parallel.hpp"

namespace nlsgs {

namespace {

struct Eval
{
  double dirichlet = 0.0;
  double mass = 0.0;
  double lp = 0.0;
};

Eval eval(const Field &u, double p)
{
  const auto t = field_terms(u, p);
  return {t.dirichlet, t.mass, t.lp};
}

double level_of(double lp, double p) { return (p - 2.0) / (2.0 * p) * lp; }

std::vector<double> solve_p(const SparseSym &P, std::span<const double> rhs, double tol)
{
  CgOptions opt;
  opt.tol = tol;
  try
  {
    return solve_cg(P, rhs, 0.0, opt);
  }
  catch (const SolverFailure &e)
  {
    throw LinearSolveFailed(std::string("action preconditioner: ") + e.what());
  }
}

std::optional<ActionState> descend(const LabeledStart &start, double lambda, double p,
                                   const SparseSym &P, const ActionParams &params)
{
  constexpr double eps = std::numeric_limits<double>::epsilon();
  Field u = nehari_project(start.field, lambda, p);
  double lp = lp_integral(u, p);
  double t = params.step0;
  const std::size_t n = u.size();
  std::vector<double> g(n);
  for (int it = 0; it <= params.max_iter; ++it)
  {
    const auto pu = matvec(P, u.values());
    const auto load = nonlinear_load(u, p);
    for (std::size_t i = 0; i < n; ++i)
    {
      g[i] = pu[i] - load[i];
    }
    const auto d = solve_p(P, g, params.cg_tol);
    const double gd = std::max(dot(g, d), 0.0);
    const double unorm2 = dot(u.values(), pu);
    const double grel = std::sqrt(gd / unorm2);
    if (grel <= params.tol)
    {
      ActionState s;
      std::vector<double> normal(n);
      for (std::size_t i = 0; i < n; ++i)
      {
        normal[i] = 2.0 * pu[i] - p * load[i];
      }
      const auto z = solve_p(P, normal, params.cg_tol);
      const double nn = dot(normal, z);
      const double gn = dot(g, z);
      s.angle_residual = std::sqrt(std::max(gd - gn * gn / nn, 0.0) / nn);
      s.gradient_residual = grel;
      s.lambda = lambda;
      s.level = level_of(lp, p);
      s.mass = mass(u);
      s.nehari_residual = nehari_residual(u, lambda, p);
      s.start_label = start.label;
      s.iterations = it;
      s.field = std::move(u);
      return s;
    }
    if (it == params.max_iter)
    {
      break;
    }
    const double j0 = level_of(lp, p);
    // Once the predicted decrease is below the rounding of J the level test
    // is meaningless; take plain unit steps.
    if (gd < 1e-10 * unorm2)
    {
      t = 1.0;
    }
    const bool local = gd < 1e-10 * unorm2;
    bool accepted = false;
    while (t >= params.step_min)
    {
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i)
      {
        w[i] = u[i] - t * d[i];
      }
      Field trial = nehari_project(Field(u.space_ptr(), std::move(w)), lambda, p);
      const double lp_trial = lp_integral(trial, p);
      const double j1 = level_of(lp_trial, p);
      // The slack admits steps whose decrease is below rounding of J.
      if (local || j1 <= j0 - params.armijo * t * gd + 8.0 * eps * j0)
      {
        u = std::move(trial);
        lp = lp_trial;
        t = std::min(2.0 * t, 1.0);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted)
    {
      break;
    }
  }
  return std::nullopt;
}

}  // namespace

void ActionParams::validate() const
{
  if (!(tol > 0.0) || !(armijo > 0.0 && armijo < 1.0) || !(step0 > 0.0) || max_iter < 0 ||
      !(envelope_window >= 0.0))
  {
    throw InvalidInput("action solver: invalid parameters");
  }
}

double nehari_residual(const Field &u, double lambda, double p)
{
  const auto e = eval(u, p);
  return std::abs(e.dirichlet + lambda * e.mass - e.lp) / e.lp;
}

Field nehari_project(const Field &u, double lambda, double p)
{
  require_exponent(p);
  if (!(lambda > 0.0))
  {
    throw NonPositiveLambda("Nehari projection needs lambda > 0");
  }
  const auto e = eval(u, p);
  if (!(e.lp > 0.0))
  {
    throw ZeroField("cannot project the zero field onto the Nehari manifold");
  }
  const double sigma = std::pow((e.dirichlet + lambda * e.mass) / e.lp, 1.0 / (p - 2.0));
  return u.scaled(sigma);
}

ActionResult minimize_action(const std::vector<LabeledStart> &starts, double lambda, double p,
                             const ActionParams &params)
{
  require_exponent(p);
  params.validate();
  if (!(lambda > 0.0))
  {
    throw NonPositiveLambda("action ground states exist only for lambda > 0");
  }
  if (starts.empty())
  {
    throw InvalidInput("minimize_action: no starts");
  }
  const auto &space = starts.front().field.space();
  const SparseSym P = space.shifted(lambda);
  const auto runs = parallel_map<std::optional<ActionState>>(
      starts.size(), [&](std::size_t i) { return descend(starts[i], lambda, p, P, params); });

  ActionResult out;
  out.starts_total = starts.size();
  for (const auto &r : runs)
  {
    if (r)
    {
      out.converged.push_back(*r);
    }
  }
  if (out.converged.empty())
  {
    throw NoStartConverged("action descent: no start converged at lambda = " +
                           std::to_string(lambda));
  }
  const ActionState *best = &out.converged.front();
  for (const auto &s : out.converged)
  {
    const double tie = 1e-10 * std::max(1.0, std::abs(s.level));
    if (s.level < best->level - tie)
    {
      best = &s;
    }
  }
  out.best = *best;
  out.envelope.lambda = lambda;
  out.envelope.window = params.envelope_window;
  for (const auto &s : out.converged)
  {
    if (s.level <= out.best.level * (1.0 + params.envelope_window))
    {
      out.envelope.masses.push_back(s.mass);
    }
  }
  std::sort(out.envelope.masses.begin(), out.envelope.masses.end());
  return out;
}

std::pair<double, double> mass_of_action_gs(const MassEnvelope &envelope)
{
  if (envelope.masses.empty())
  {
    throw InvalidInput("mass envelope is empty");
  }
  const auto [lo, hi] = std::minmax_element(envelope.masses.begin(), envelope.masses.end());
  return {*lo, *hi};
}

std::vector<LabeledStart> default_action_starts(std::shared_ptr<const FemSpace> space, double p,
                                                double lambda, const SolitonProfile &profile,
                                                std::uint64_t seed)
{
  require_exponent(p);
  std::vector<LabeledStart> out;
  out.push_back({"constant", nehari_project(Field::constant(space, 1.0), lambda, p)});
  const auto corners = mesh_corners(space->mesh());
  for (std::size_t k = 0; k < corners.size(); ++k)
  {
    const auto [lo, hi] = bump_lambda_range(*space, corners[k]);
    const double lam = std::clamp(lambda, lo, hi);
    out.push_back({"vertex-" + std::to_string(k),
                   nehari_project(soliton_field(profile, lam, corners[k].point, space), lambda, p)});
  }
  for (std::uint64_t r = 0; r < 3; ++r)
  {
    out.push_back({"random-" + std::to_string(r),
                   nehari_project(random_positive_field(space, seed * 1000003ULL + r), lambda, p)});
  }
  return out;
}

}  // namespace nlsgs
