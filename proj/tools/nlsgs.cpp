// nlsgs: command line front end for the ground-state solvers and experiments.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nlsgs/action_min.hpp"
#include "nlsgs/energy_min.hpp"
#include "nlsgs/errors.hpp"
#include "nlsgs/experiments.hpp"
#include "nlsgs/report.hpp"
#include "nlsgs/soliton.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace nlsgs;

namespace {

constexpr int kSolverFailure = 2;
constexpr int kInvalidInput = 3;

struct Options
{
  std::string polygon = "builtin:equilateral";
  std::optional<double> p;
  std::optional<double> mu;
  std::optional<double> lambda;
  std::optional<std::string> grid;
  std::optional<std::string> config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  bool plots = false;
};

struct Context
{
  Options opt;
  Polygon polygon;
  ExperimentConfig cfg;
  double p = 4.0;
  fs::path out;
};

Context make_context(const Options &opt)
{
  Context c{opt, load_polygon(opt.polygon), {}, 4.0, opt.out};
  if (opt.config)
  {
    c.cfg = ExperimentConfig::from_map(load_key_values(*opt.config));
  }
  if (opt.p)
  {
    c.cfg.p = *opt.p;
  }
  if (opt.seed)
  {
    c.cfg.seed = *opt.seed;
  }
  c.p = c.cfg.p;
  fs::create_directories(c.out);
  return c;
}

template<class T>
T require(const std::optional<T> &v, const char *flag)
{
  if (!v)
  {
    throw InvalidInput(std::string("missing required flag ") + flag);
  }
  return *v;
}

std::ofstream open_out(const fs::path &path)
{
  std::ofstream f(path);
  if (!f)
  {
    throw InvalidInput("cannot write " + path.string());
  }
  return f;
}

void write_json(const fs::path &path, const json &j)
{
  open_out(path) << j.dump(2) << "\n";
}

void chart(const Context &c, const std::string &name, const std::vector<Series> &series,
           const ChartOptions &options)
{
  if (c.opt.plots)
  {
    auto f = open_out(c.out / (name + ".svg"));
    write_svg_chart(f, series, options);
  }
}

std::vector<double> grid_or(const Options &opt, std::vector<double> fallback)
{
  return opt.grid ? parse_grid(*opt.grid) : std::move(fallback);
}

double alpha_of(const Polygon &polygon) { return smallest_angle(polygon).angle; }

int cmd_mesh(const Context &c)
{
  const auto mesh = c.opt.lambda ? mesh_for_lambda(c.polygon, *c.opt.lambda, c.cfg)
                                 : mesh_for_energy(c.polygon, c.cfg);
  save_mesh((c.out / "mesh.txt").string(), mesh);
  std::printf("nodes %zu triangles %zu h_max %.4g h_min %.4g area %.6g\n", mesh.node_count(),
              mesh.triangles().size(), mesh.h_max(), mesh.h_min(), mesh.area());
  return 0;
}

int cmd_soliton(const Context &c)
{
  const auto &prof = soliton_profile(c.p);
  auto f = open_out(c.out / "soliton.csv");
  write_profile_csv(f, prof, 10);
  const double alpha = alpha_of(c.polygon);
  std::printf("p %.4g f0 %.10g mass %.10g", c.p, prof.f0, prof.mass);
  if (c.p == 4.0)
  {
    std::printf(" mu_bar_alpha %.10g (alpha %.6g)", critical_mass(alpha), alpha);
  }
  std::printf("\n");
  return 0;
}

int cmd_energy(const Context &c)
{
  const double mu = require(c.opt.mu, "--mu");
  const auto space = FemSpace::create(mesh_for_energy(c.polygon, c.cfg));
  auto log = open_out(c.out / "energy_log.jsonl");
  const auto r = minimize_energy(default_starts(space, c.p, mu, soliton_profile(c.p), c.cfg.seed),
                                 c.p, mu, c.cfg.flow, &log);
  json summary{{"p", c.p}, {"mu", mu}, {"nodes", space->size()}};
  if (const auto *gs = std::get_if<GroundState>(&r))
  {
    save_field((c.out / "energy_gs.field").string(), gs->field);
    summary.update({{"verdict", "bounded"},
                    {"level", gs->level},
                    {"lambda_u", gs->lambda},
                    {"residual", gs->residual},
                    {"start", gs->start_label},
                    {"iterations", gs->iterations}});
    std::printf("bounded: level %.10g lambda_u %.10g residual %.2e start %s\n", gs->level,
                gs->lambda, gs->residual, gs->start_label.c_str());
  }
  else
  {
    const auto &u = std::get<Unbounded>(r);
    summary.update({{"verdict", "unbounded"}, {"start", u.start_label}, {"step", u.step}});
    std::printf("unbounded: start %s step %d\n", u.start_label.c_str(), u.step);
  }
  write_json(c.out / "energy_gs.json", summary);
  return 0;
}

int cmd_action(const Context &c)
{
  const double lambda = require(c.opt.lambda, "--lambda");
  const auto space = FemSpace::create(mesh_for_lambda(c.polygon, lambda, c.cfg));
  const auto r = minimize_action(
      default_action_starts(space, c.p, lambda, soliton_profile(c.p), c.cfg.seed), lambda, c.p,
      c.cfg.action);
  save_field((c.out / "action_gs.field").string(), r.best.field);
  const auto [lo, hi] = mass_of_action_gs(r.envelope);
  write_json(c.out / "action_gs.json", {{"p", c.p},
                                        {"lambda", lambda},
                                        {"nodes", space->size()},
                                        {"level", r.best.level},
                                        {"mass", r.best.mass},
                                        {"m_lo", lo},
                                        {"m_hi", hi},
                                        {"nehari_residual", r.best.nehari_residual},
                                        {"start", r.best.start_label},
                                        {"starts_converged", r.converged.size()}});
  std::printf("level %.10g mass %.10g envelope [%.10g, %.10g] start %s (%zu/%zu converged)\n",
              r.best.level, r.best.mass, lo, hi, r.best.start_label.c_str(), r.converged.size(),
              r.starts_total);
  return 0;
}

void lambda_outputs(const Context &c, const std::string &name, const std::vector<SweepRecord> &rs)
{
  auto f = open_out(c.out / (name + ".csv"));
  write_lambda_csv(f, rs);
  Series level{"level", {}, {}};
  Series lo{"m_lo", {}, {}};
  Series hi{"m_hi", {}, {}};
  for (const auto &r : rs)
  {
    level.x.push_back(r.parameter);
    level.y.push_back(r.level);
    lo.x.push_back(r.parameter);
    lo.y.push_back(r.m_lo);
    hi.x.push_back(r.parameter);
    hi.y.push_back(r.m_hi);
  }
  chart(c, name + "_level", {level}, {"action level J(lambda)", "lambda", "J", true});
  chart(c, name + "_mass", {lo, hi}, {"ground-state mass M(lambda)", "lambda", "mass", true});
}

void mass_outputs(const Context &c, const std::string &name, const std::vector<SweepRecord> &rs)
{
  auto f = open_out(c.out / (name + ".csv"));
  write_mass_csv(f, rs);
  Series level{"level", {}, {}};
  Series lam{"lambda_u", {}, {}};
  for (const auto &r : rs)
  {
    level.x.push_back(r.parameter);
    level.y.push_back(r.ok && !r.unbounded ? r.level : std::nan(""));
    lam.x.push_back(r.parameter);
    lam.y.push_back(r.ok && !r.unbounded ? r.lambda_u : std::nan(""));
  }
  chart(c, name + "_level", {level}, {"energy level E(mu)", "mu", "E", false});
  chart(c, name + "_lambda", {lam}, {"multiplier lambda_u(mu)", "mu", "lambda_u", false});
}

int report_rows(const std::vector<SweepRecord> &rs)
{
  int failed = 0;
  for (const auto &r : rs)
  {
    if (!r.ok)
    {
      std::fprintf(stderr, "row %.6g failed: %s\n", r.parameter, r.error.c_str());
      ++failed;
    }
  }
  return failed > 0 && failed == static_cast<int>(rs.size()) ? kSolverFailure : 0;
}

int cmd_sweep_lambda(const Context &c)
{
  const auto grid = parse_grid(require(c.opt.grid, "--grid"));
  std::vector<SweepRecord> rs;
  if (!grid.empty())
  {
    const auto space = FemSpace::create(mesh_for_lambda(c.polygon, grid.back(), c.cfg));
    rs = sweep_lambda(space, c.p, grid, c.cfg);
  }
  lambda_outputs(c, "lambda_sweep", rs);
  for (const auto &d : derivative_check(rs))
  {
    std::printf("lambda %.6g slope %.8g mass/2 %.8g error %.3g%s\n", d.lambda, d.slope,
                d.half_mass, d.relative_error, d.checked ? "" : " (not checked)");
  }
  if (const auto w = detect_nonmonotone(rs, c.cfg.witness_factor))
  {
    std::printf("non-monotone: M-(%.6g) = %.8g > M+(%.6g) = %.8g, margin %.3g, noise %.3g\n",
                w->lambda1, w->m1, w->lambda2, w->m2, w->margin, w->noise);
  }
  return report_rows(rs);
}

int cmd_sweep_mass(const Context &c)
{
  const auto grid = parse_grid(require(c.opt.grid, "--grid"));
  std::vector<SweepRecord> rs;
  if (!grid.empty())
  {
    rs = sweep_mass(FemSpace::create(mesh_for_energy(c.polygon, c.cfg)), c.p, grid, c.cfg);
  }
  mass_outputs(c, "mass_sweep", rs);
  for (const auto &[a, b] : jump_intervals(rs))
  {
    std::printf("lambda_u jump in [%.8g, %.8g]\n", a, b);
  }
  return report_rows(rs);
}

int cmd_asymptotics(const Context &c)
{
  const auto t = run_asymptotics(c.polygon, grid_or(c.opt, {5, 10, 20, 40}), c.cfg);
  auto f = open_out(c.out / "asymptotics.csv");
  write_asymptotics_csv(f, t);
  Series gap{"gap", {}, {}};
  Series err{"mass error", {}, {}};
  for (const auto &r : t.rows)
  {
    gap.x.push_back(r.lambda);
    gap.y.push_back(r.gap);
    err.x.push_back(r.lambda);
    err.y.push_back(r.mass_error);
    std::printf("lambda %.6g level %.8g reference %.8g gap %.4g mass %.8g mass_error %.4g\n",
                r.lambda, r.level, r.reference, r.gap, r.mass, r.mass_error);
  }
  chart(c, "asymptotics", {gap, err}, {"large-lambda asymptotics", "lambda", "", true});
  std::printf("gap decreasing: %s, mass error decreasing: %s\n", t.gap_decreasing ? "yes" : "no",
              t.mass_error_decreasing ? "yes" : "no");
  return 0;
}

int cmd_critical_mass(const Context &c)
{
  const double mba = critical_mass(alpha_of(c.polygon));
  std::vector<double> mus;
  if (c.opt.mu)
  {
    mus.push_back(*c.opt.mu);
  }
  else
  {
    for (double r : grid_or(c.opt, {0.5, 0.8, 0.95, 1.0, 1.05, 1.2, 1.5}))
    {
      mus.push_back(r * mba);
    }
  }
  const auto t = run_critical_mass(c.polygon, mus, c.cfg);
  auto f = open_out(c.out / "critical_mass.csv");
  write_critical_mass_csv(f, t);
  for (const auto &r : t.rows)
  {
    std::printf("mu %.8g ratio %.4g %s%s\n", r.mu, r.ratio, r.bounded ? "bounded" : "unbounded",
                r.stable() ? "" : " (changes with halved tau)");
  }
  std::printf("dichotomy holds: %s\n", t.dichotomy_holds() ? "yes" : "no");
  return 0;
}

int cmd_nonuniqueness(const Context &c)
{
  std::vector<double> ps{3.8, 3.9, 3.95};
  if (c.opt.p)
  {
    ps = {*c.opt.p};
  }
  json summary = json::array();
  for (double p : ps)
  {
    const auto r = run_nonuniqueness(c.polygon, p, c.cfg);
    char tag[32];
    std::snprintf(tag, sizeof tag, "p%.4g", p);
    lambda_outputs(c, std::string("nonuniqueness_") + tag + "_lambda", r.lambda_sweep);
    if (!r.mass_sweep.empty())
    {
      mass_outputs(c, std::string("nonuniqueness_") + tag + "_mass", r.mass_sweep);
    }
    json entry{{"p", p}, {"confirmed", r.confirmed()}, {"jump_matches", r.jump_matches}};
    if (r.witness)
    {
      const auto &w = *r.witness;
      entry["witness"] = {{"lambda1", w.lambda1}, {"lambda2", w.lambda2}, {"m1", w.m1},
                          {"m2", w.m2},           {"margin", w.margin},   {"noise", w.noise}};
      for (const auto &chk : r.checks)
      {
        entry["checks"].push_back({{"variant", chk.variant},
                                   {"m1", chk.m1},
                                   {"m2", chk.m2},
                                   {"margin", chk.margin},
                                   {"survives", chk.survives}});
      }
      std::printf("p %.4g: witness M-(%.6g) = %.8g > M+(%.6g) = %.8g, margin %.3g, noise %.3g\n", p,
                  w.lambda1, w.m1, w.lambda2, w.m2, w.margin, w.noise);
      for (const auto &chk : r.checks)
      {
        std::printf("  %s: margin %.3g %s\n", chk.variant.c_str(), chk.margin,
                    chk.survives ? "survives" : "lost");
      }
      std::printf("  lambda_u jump in matching mass range: %s\n", r.jump_matches ? "yes" : "no");
    }
    else
    {
      std::printf("p %.4g: no witness\n", p);
    }
    summary.push_back(entry);
  }
  write_json(c.out / "nonuniqueness.json", summary);
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Ground states of the nonlinear Schroedinger equation on polygons"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--polygon", opt.polygon,
                 "Polygon file or builtin:square|builtin:equilateral|builtin:right345");
  app.add_option("--p", opt.p, "Nonlinearity exponent in (2, 4]");
  app.add_option("--mu", opt.mu, "Prescribed mass");
  app.add_option("--lambda", opt.lambda, "Frequency");
  app.add_option("--grid", opt.grid, "Grid lo:hi:n[:geom]");
  app.add_option("--config", opt.config, "key = value configuration file");
  app.add_option("--out", opt.out, "Output directory");
  app.add_option("--seed", opt.seed, "Random seed");
  app.add_flag("--plots", opt.plots, "Write SVG charts next to the CSV files");

  const std::vector<std::pair<std::string, int (*)(const Context &)>> commands{
      {"mesh", cmd_mesh},
      {"soliton", cmd_soliton},
      {"energy-gs", cmd_energy},
      {"action-gs", cmd_action},
      {"sweep-lambda", cmd_sweep_lambda},
      {"sweep-mass", cmd_sweep_mass},
      {"asymptotics", cmd_asymptotics},
      {"critical-mass", cmd_critical_mass},
      {"nonuniqueness", cmd_nonuniqueness},
  };
  const std::vector<std::string> help{
      "Triangulate the polygon (refined for --lambda when given)",
      "Radial soliton profile for --p",
      "Energy ground state at mass --mu",
      "Action ground state at frequency --lambda",
      "Action ground states over --grid of frequencies",
      "Energy ground states over --grid of masses",
      "Large-frequency asymptotics at p = 4 (--grid of frequencies)",
      "Critical-mass dichotomy at p = 4 (--grid of ratios or --mu)",
      "Non-uniqueness witness search for p in {3.8, 3.9, 3.95} or --p",
  };
  for (std::size_t i = 0; i < commands.size(); ++i)
  {
    app.add_subcommand(commands[i].first, help[i]);
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    app.exit(e);
    return kInvalidInput;
  }

  try
  {
    const auto ctx = make_context(opt);
    for (const auto &[name, run] : commands)
    {
      if (app.got_subcommand(name))
      {
        return run(ctx);
      }
    }
  }
  catch (const InvalidInput &e)
  {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kInvalidInput;
  }
  catch (const Error &e)
  {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kSolverFailure;
  }
  catch (const fs::filesystem_error &e)
  {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kInvalidInput;
  }
  return 0;
}
