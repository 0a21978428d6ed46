#include "nlsgs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nlsgs/errors.hpp"
#include "nlsgs/parallel.hpp"
#include "nlsgs/report.hpp"
#include "nlsgs/soliton.hpp"

namespace nlsgs {

namespace {

double to_double(const std::string &key, const std::string &value)
{
  std::size_t used = 0;
  double v = 0.0;
  try
  {
    v = std::stod(value, &used);
  }
  catch (const std::exception &)
  {
    used = 0;
  }
  if (used != value.size() || !std::isfinite(v))
  {
    throw InvalidInput("config key '" + key + "': '" + value + "' is not a finite number");
  }
  return v;
}

int to_int(const std::string &key, const std::string &value)
{
  const double v = to_double(key, value);
  if (v != std::floor(v) || std::abs(v) > 1e9)
  {
    throw InvalidInput("config key '" + key + "': '" + value + "' is not an integer");
  }
  return static_cast<int>(v);
}

double point_triangle_distance(Point2 x, Point2 a, Point2 b, Point2 c)
{
  const double d1 = orient(a, b, x);
  const double d2 = orient(b, c, x);
  const double d3 = orient(c, a, x);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  if (!(neg && pos))
  {
    return 0.0;
  }
  auto seg = [&](Point2 p, Point2 q) {
    const Point2 d = q - p;
    const double t = std::clamp(dot(x - p, d) / dot(d, d), 0.0, 1.0);
    return distance(x, p + t * d);
  };
  return std::min({seg(a, b), seg(b, c), seg(c, a)});
}

TriMesh refine_towards(TriMesh mesh, Point2 vertex, double radius, int levels)
{
  if (levels <= 0)
  {
    return mesh;
  }
  // Each level halves the refined disk, grading the mesh towards the vertex.
  return refine_marked(
      mesh,
      [=](int level, Point2 a, Point2 b, Point2 c) {
        return point_triangle_distance(vertex, a, b, c) <= radius * std::ldexp(1.0, 1 - level);
      },
      levels);
}

double stddev(const std::vector<double> &v)
{
  if (v.size() < 2)
  {
    return 0.0;
  }
  double mean = 0.0;
  for (const double x : v)
  {
    mean += x;
  }
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (const double x : v)
  {
    s += (x - mean) * (x - mean);
  }
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::uint64_t reseed(std::uint64_t seed, int k) { return seed + 7919ULL * static_cast<std::uint64_t>(k); }

ActionResult solve_action(std::shared_ptr<const FemSpace> space, double p, double lambda,
                          std::uint64_t seed, const ExperimentConfig &config)
{
  auto starts = default_action_starts(space, p, lambda, soliton_profile(p), seed);
  return minimize_action(starts, lambda, p, config.action);
}

EnergyResult solve_energy(std::shared_ptr<const FemSpace> space, double p, double mu,
                          std::uint64_t seed, const FlowParams &flow)
{
  auto starts = default_starts(space, p, mu, soliton_profile(p), seed);
  return minimize_energy(starts, p, mu, flow);
}

bool strictly_decreasing(const std::vector<double> &v)
{
  for (std::size_t i = 1; i < v.size(); ++i)
  {
    if (!(v[i] < v[i - 1]))
    {
      return false;
    }
  }
  return true;
}

std::string cell(double v) { return std::isfinite(v) ? format_double(v) : ""; }

}  // namespace

void ExperimentConfig::set(const std::string &key, const std::string &value)
{
  static const std::map<std::string, std::function<void(ExperimentConfig &, const std::string &,
                                                        const std::string &)>>
      setters = {
          {"p", [](auto &c, auto &k, auto &v) { c.p = to_double(k, v); }},
          {"h", [](auto &c, auto &k, auto &v) { c.h = to_double(k, v); }},
          {"apex_h_factor", [](auto &c, auto &k, auto &v) { c.apex_h_factor = to_double(k, v); }},
          {"refine_radius_factor",
           [](auto &c, auto &k, auto &v) { c.refine_radius_factor = to_double(k, v); }},
          {"energy_corner_levels",
           [](auto &c, auto &k, auto &v) { c.energy_corner_levels = to_int(k, v); }},
          {"seed",
           [](auto &c, auto &k, auto &v) { c.seed = static_cast<std::uint64_t>(to_int(k, v)); }},
          {"noise_solves", [](auto &c, auto &k, auto &v) { c.noise_solves = to_int(k, v); }},
          {"noise_floor", [](auto &c, auto &k, auto &v) { c.noise_floor = to_double(k, v); }},
          {"witness_factor", [](auto &c, auto &k, auto &v) { c.witness_factor = to_double(k, v); }},
          {"jump_factor", [](auto &c, auto &k, auto &v) { c.jump_factor = to_double(k, v); }},
          {"sector_radius_factor",
           [](auto &c, auto &k, auto &v) { c.sector_radius_factor = to_double(k, v); }},
          {"sector_fine_factor",
           [](auto &c, auto &k, auto &v) { c.sector_fine_factor = to_double(k, v); }},
          {"sector_coarse_h", [](auto &c, auto &k, auto &v) { c.sector_coarse_h = to_double(k, v); }},
          {"flow.tau", [](auto &c, auto &k, auto &v) { c.flow.tau = to_double(k, v); }},
          {"flow.tol_residual",
           [](auto &c, auto &k, auto &v) { c.flow.tol_residual = to_double(k, v); }},
          {"flow.max_steps", [](auto &c, auto &k, auto &v) { c.flow.max_steps = to_int(k, v); }},
          {"flow.blowup_energy",
           [](auto &c, auto &k, auto &v) { c.flow.blowup_energy = to_double(k, v); }},
          {"flow.blowup_gradnorm",
           [](auto &c, auto &k, auto &v) { c.flow.blowup_gradnorm = to_double(k, v); }},
          {"flow.blowup_mesh_factor",
           [](auto &c, auto &k, auto &v) { c.flow.blowup_mesh_factor = to_double(k, v); }},
          {"action.tol", [](auto &c, auto &k, auto &v) { c.action.tol = to_double(k, v); }},
          {"action.max_iter", [](auto &c, auto &k, auto &v) { c.action.max_iter = to_int(k, v); }},
          {"action.armijo", [](auto &c, auto &k, auto &v) { c.action.armijo = to_double(k, v); }},
          {"action.step0", [](auto &c, auto &k, auto &v) { c.action.step0 = to_double(k, v); }},
          {"action.envelope_window",
           [](auto &c, auto &k, auto &v) { c.action.envelope_window = to_double(k, v); }},
      };
  const auto it = setters.find(key);
  if (it == setters.end())
  {
    throw InvalidInput("unknown config key '" + key + "'");
  }
  it->second(*this, key, value);
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string> &kv)
{
  ExperimentConfig c;
  for (const auto &[k, v] : kv)
  {
    c.set(k, v);
  }
  return c;
}

std::vector<double> parse_grid(const std::string &spec)
{
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':'))
  {
    parts.push_back(item);
  }
  if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "geom"))
  {
    throw InvalidInput("grid '" + spec + "': expected lo:hi:n or lo:hi:n:geom");
  }
  const double lo = to_double("grid", parts[0]);
  const double hi = to_double("grid", parts[1]);
  const int n = to_int("grid", parts[2]);
  const bool geom = parts.size() == 4;
  if (n < 0 || (n > 1 && !(hi > lo)) || (geom && !(lo > 0.0)))
  {
    throw InvalidInput("grid '" + spec + "': need n >= 0, lo < hi, and lo > 0 for geom");
  }
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
  {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    out.push_back(geom ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  if (n > 1)
  {
    out.back() = hi;
  }
  return out;
}

TriMesh mesh_for_lambda(const Polygon &polygon, double lambda, const ExperimentConfig &config)
{
  TriMesh mesh = triangulate(polygon, config.h);
  const auto corner = smallest_angle(polygon);
  const double target = config.apex_h_factor / std::sqrt(lambda);
  int levels = 0;
  for (double h = mesh.h_max(); h > target; h *= 0.5)
  {
    ++levels;
  }
  return refine_towards(std::move(mesh), polygon[corner.vertex],
                        config.refine_radius_factor / std::sqrt(lambda), levels);
}

TriMesh mesh_for_energy(const Polygon &polygon, const ExperimentConfig &config)
{
  TriMesh mesh = triangulate(polygon, config.h);
  const auto corner = smallest_angle(polygon);
  return refine_towards(std::move(mesh), polygon[corner.vertex], 0.25 * std::sqrt(polygon.area()),
                        config.energy_corner_levels);
}

std::string classify_branch(const Field &u)
{
  const auto v = u.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi - *lo <= 1e-6 * std::max(std::abs(*hi), std::abs(*lo)))
  {
    return "flat";
  }
  const Point2 peak = u.mesh().nodes()[static_cast<std::size_t>(hi - v.begin())];
  const auto corners = mesh_corners(u.mesh());
  std::size_t best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < corners.size(); ++k)
  {
    const double d = distance(peak, corners[k].point);
    if (d < dist)
    {
      dist = d;
      best = k;
    }
  }
  if (corners.empty() || dist > 0.25 * std::sqrt(u.space().area()))
  {
    return "interior";
  }
  return "vertex-" + std::to_string(best);
}

std::vector<SweepRecord> sweep_lambda(std::shared_ptr<const FemSpace> space, double p,
                                      const std::vector<double> &grid,
                                      const ExperimentConfig &config)
{
  for (std::size_t i = 0; i < grid.size(); ++i)
  {
    if (!(grid[i] > 0.0))
    {
      throw NonPositiveLambda("lambda grid must be positive");
    }
    if (i > 0 && !(grid[i] > grid[i - 1]))
    {
      throw InvalidInput("lambda grid must be strictly ascending");
    }
  }
  return parallel_map<SweepRecord>(grid.size(), [&](std::size_t i) {
    SweepRecord rec;
    rec.parameter = grid[i];
    try
    {
      const auto r = solve_action(space, p, grid[i], config.seed, config);
      std::tie(rec.m_lo, rec.m_hi) = mass_of_action_gs(r.envelope);
      rec.level = r.best.level;
      rec.mass = r.best.mass;
      rec.lambda_u = grid[i];
      rec.residual = r.best.gradient_residual;
      rec.nehari_residual = r.best.nehari_residual;
      rec.iterations = r.best.iterations;
      rec.starts_converged = r.converged.size();
      rec.start_label = r.best.start_label;
      rec.branch = classify_branch(r.best.field);
      std::vector<double> masses{r.best.mass};
      for (int k = 1; k < config.noise_solves; ++k)
      {
        masses.push_back(solve_action(space, p, grid[i], reseed(config.seed, k), config).best.mass);
      }
      rec.noise = std::max(stddev(masses), config.noise_floor * rec.mass);
      rec.flagged = rec.m_hi - rec.m_lo > rec.noise;
      rec.ok = true;
    }
    catch (const Error &e)
    {
      rec.error = e.what();
    }
    return rec;
  });
}

std::vector<SweepRecord> sweep_mass(std::shared_ptr<const FemSpace> space, double p,
                                    const std::vector<double> &grid,
                                    const ExperimentConfig &config)
{
  for (std::size_t i = 0; i < grid.size(); ++i)
  {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
    {
      throw InvalidInput("mass grid must be positive and strictly ascending");
    }
  }
  auto records = parallel_map<SweepRecord>(grid.size(), [&](std::size_t i) {
    SweepRecord rec;
    rec.parameter = grid[i];
    try
    {
      const auto r = solve_energy(space, p, grid[i], config.seed, config.flow);
      if (const auto *u = std::get_if<Unbounded>(&r))
      {
        rec.unbounded = true;
        rec.start_label = u->start_label;
        rec.iterations = u->step;
        rec.ok = true;
        return rec;
      }
      const auto &gs = std::get<GroundState>(r);
      rec.level = gs.level;
      rec.mass = gs.mass;
      rec.lambda_u = gs.lambda;
      rec.residual = gs.residual;
      rec.iterations = gs.iterations;
      rec.start_label = gs.start_label;
      rec.branch = classify_branch(gs.field);
      std::vector<double> lambdas{gs.lambda};
      for (int k = 1; k < config.noise_solves; ++k)
      {
        const auto again = solve_energy(space, p, grid[i], reseed(config.seed, k), config.flow);
        if (const auto *g = std::get_if<GroundState>(&again))
        {
          lambdas.push_back(g->lambda);
        }
      }
      rec.noise = std::max(stddev(lambdas), config.noise_floor * std::abs(gs.lambda));
      rec.ok = true;
    }
    catch (const Error &e)
    {
      rec.error = e.what();
    }
    return rec;
  });

  // Jumps are measured on log(lambda_u).
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < records.size(); ++i)
  {
    if (records[i].ok && !records[i].unbounded && records[i].lambda_u > 0.0)
    {
      idx.push_back(i);
    }
  }
  if (idx.size() >= 3)
  {
    std::vector<double> gaps;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k)
    {
      gaps.push_back(std::log(records[idx[k + 1]].lambda_u / records[idx[k]].lambda_u));
    }
    std::vector<double> sorted;
    for (const double g : gaps)
    {
      sorted.push_back(std::abs(g));
    }
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2),
                     sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (std::size_t k = 0; k < gaps.size(); ++k)
    {
      const auto &a = records[idx[k]];
      const auto &b = records[idx[k + 1]];
      const double noise = std::max(a.noise, b.noise);
      records[idx[k]].flagged = gaps[k] > config.jump_factor * median &&
                                b.lambda_u - a.lambda_u > config.jump_factor * noise;
    }
  }
  return records;
}

std::vector<std::pair<double, double>> jump_intervals(const std::vector<SweepRecord> &records)
{
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < records.size(); ++i)
  {
    if (!records[i].flagged)
    {
      continue;
    }
    for (std::size_t j = i + 1; j < records.size(); ++j)
    {
      if (records[j].ok && !records[j].unbounded)
      {
        out.emplace_back(records[i].parameter, records[j].parameter);
        break;
      }
    }
  }
  return out;
}

std::optional<NonMonotoneWitness> detect_nonmonotone(const std::vector<SweepRecord> &records,
                                                     double factor, double noise)
{
  std::optional<NonMonotoneWitness> best;
  for (std::size_t i = 0; i < records.size(); ++i)
  {
    if (!records[i].ok || !std::isfinite(records[i].m_lo))
    {
      continue;
    }
    for (std::size_t j = 0; j < records.size(); ++j)
    {
      if (!records[j].ok || !std::isfinite(records[j].m_hi) ||
          !(records[j].parameter > records[i].parameter))
      {
        continue;
      }
      const double margin = records[i].m_lo - records[j].m_hi;
      if (!best || margin > best->margin)
      {
        best = NonMonotoneWitness{records[i].parameter, records[j].parameter, records[i].m_lo,
                                  records[j].m_hi, margin,
                                  noise >= 0.0 ? noise
                                               : std::max(records[i].noise, records[j].noise)};
      }
    }
  }
  if (best && best->margin > factor * best->noise && best->margin > 0.0)
  {
    return best;
  }
  return std::nullopt;
}

std::vector<DerivativeRow> derivative_check(const std::vector<SweepRecord> &records)
{
  std::vector<DerivativeRow> out;
  for (std::size_t i = 1; i + 1 < records.size(); ++i)
  {
    const auto &a = records[i - 1];
    const auto &b = records[i];
    const auto &c = records[i + 1];
    DerivativeRow row;
    row.lambda = b.parameter;
    if (!(a.ok && b.ok && c.ok))
    {
      out.push_back(row);
      continue;
    }
    const double h1 = b.parameter - a.parameter;
    const double h2 = c.parameter - b.parameter;
    row.slope = -h2 / (h1 * (h1 + h2)) * a.level + (h2 - h1) / (h1 * h2) * b.level +
                h1 / (h2 * (h1 + h2)) * c.level;
    row.half_mass = 0.5 * b.mass;
    row.relative_error = std::abs(row.slope - row.half_mass) / row.half_mass;
    const bool singleton = b.m_hi - b.m_lo <= b.noise;
    const bool same_branch = a.branch == b.branch && b.branch == c.branch;
    row.checked = singleton && same_branch;
    out.push_back(row);
  }
  return out;
}

std::vector<RobustnessCheck> check_witness(const Polygon &polygon, double p,
                                           const NonMonotoneWitness &witness, double lambda_max,
                                           const ExperimentConfig &config)
{
  const auto base = std::make_shared<const TriMesh>(mesh_for_lambda(polygon, lambda_max, config));
  struct Variant
  {
    std::string name;
    std::shared_ptr<const FemSpace> space;
    ExperimentConfig config;
  };
  std::vector<Variant> variants;
  variants.push_back({"refined", FemSpace::create(refine_uniform(*base)), config});
  ExperimentConfig halved = config;
  halved.action.step0 *= 0.5;
  halved.flow.tau *= 0.5;
  variants.push_back({"halved-step", std::make_shared<const FemSpace>(base), halved});
  ExperimentConfig reseeded = config;
  reseeded.seed = config.seed + 101;
  variants.push_back({"reseeded", std::make_shared<const FemSpace>(base), reseeded});

  return parallel_map<RobustnessCheck>(variants.size(), [&](std::size_t k) {
    const auto &v = variants[k];
    RobustnessCheck check;
    check.variant = v.name;
    const auto r1 = solve_action(v.space, p, witness.lambda1, v.config.seed, v.config);
    const auto r2 = solve_action(v.space, p, witness.lambda2, v.config.seed, v.config);
    check.m1 = mass_of_action_gs(r1.envelope).first;
    check.m2 = mass_of_action_gs(r2.envelope).second;
    check.margin = check.m1 - check.m2;
    check.survives = check.margin > witness.noise && check.margin > 0.0;
    return check;
  });
}

bool NonuniquenessResult::confirmed() const
{
  if (!witness || !jump_matches)
  {
    return false;
  }
  return std::all_of(checks.begin(), checks.end(), [](const auto &c) { return c.survives; });
}

NonuniquenessResult run_nonuniqueness(const Polygon &polygon, double p,
                                      const ExperimentConfig &config, double lambda_lo,
                                      double lambda_hi, int points, int mass_points)
{
  NonuniquenessResult out;
  out.p = p;
  const auto space = FemSpace::create(mesh_for_lambda(polygon, lambda_hi, config));
  auto grid = parse_grid(format_double(lambda_lo) + ":" + format_double(lambda_hi) + ":" +
                         std::to_string(points) + ":geom");
  out.lambda_sweep = sweep_lambda(space, p, grid, config);

  // Refine the grid inside the interval with the largest mass drop.
  double drop = 0.0;
  std::size_t at = grid.size();
  for (std::size_t i = 0; i + 1 < out.lambda_sweep.size(); ++i)
  {
    const auto &a = out.lambda_sweep[i];
    const auto &b = out.lambda_sweep[i + 1];
    if (a.ok && b.ok && a.m_lo - b.m_hi > drop)
    {
      drop = a.m_lo - b.m_hi;
      at = i;
    }
  }
  if (at < grid.size())
  {
    const double a = grid[at];
    const double b = grid[at + 1];
    std::vector<double> extra;
    for (int k = 1; k <= 3; ++k)
    {
      extra.push_back(a * std::pow(b / a, k / 4.0));
    }
    auto more = sweep_lambda(space, p, extra, config);
    out.lambda_sweep.insert(out.lambda_sweep.end(), more.begin(), more.end());
    std::sort(out.lambda_sweep.begin(), out.lambda_sweep.end(),
              [](const auto &x, const auto &y) { return x.parameter < y.parameter; });
  }

  out.witness = detect_nonmonotone(out.lambda_sweep, config.witness_factor);
  if (!out.witness)
  {
    return out;
  }
  out.checks = check_witness(polygon, p, *out.witness, lambda_hi, config);
  const double lo = 0.9 * out.witness->m2;
  const double hi = 1.1 * out.witness->m1;
  out.mass_sweep = sweep_mass(space, p,
                              parse_grid(format_double(lo) + ":" + format_double(hi) + ":" +
                                         std::to_string(mass_points)),
                              config);
  out.jumps = jump_intervals(out.mass_sweep);
  for (const auto &[a, b] : out.jumps)
  {
    if (a <= out.witness->m1 && b >= out.witness->m2)
    {
      out.jump_matches = true;
    }
  }
  return out;
}

AsymptoticsTable run_asymptotics(const Polygon &polygon, const std::vector<double> &lambdas,
                                 const ExperimentConfig &config)
{
  constexpr double p = 4.0;
  AsymptoticsTable table;
  table.alpha = smallest_angle(polygon).angle;
  const double mba = critical_mass(table.alpha);
  for (std::size_t i = 1; i < lambdas.size(); ++i)
  {
    if (!(lambdas[i] > lambdas[i - 1]))
    {
      throw InvalidInput("asymptotics: lambda list must be strictly ascending");
    }
  }
  table.rows = parallel_map<AsymptoticsRow>(lambdas.size(), [&](std::size_t i) {
    const double lam = lambdas[i];
    const auto space = FemSpace::create(mesh_for_lambda(polygon, lam, config));
    const auto r = solve_action(space, p, lam, config.seed, config);
    AsymptoticsRow row;
    row.lambda = lam;
    row.level = r.best.level;
    row.reference = table.alpha / (2 * std::numbers::pi) * lam * mu_bar() / 2.0;
    row.gap = std::abs(row.level - row.reference) / lam;
    row.relative_gap = std::abs(row.level - row.reference) / row.reference;
    row.mass = r.best.mass;
    row.mass_error = std::abs(row.mass - mba) / mba;
    row.nodes = space->size();
    return row;
  });
  std::vector<double> gaps;
  std::vector<double> errs;
  for (const auto &r : table.rows)
  {
    gaps.push_back(r.gap);
    errs.push_back(r.mass_error);
  }
  table.gap_decreasing = strictly_decreasing(gaps);
  table.mass_error_decreasing = strictly_decreasing(errs);
  return table;
}

bool CriticalMassTable::dichotomy_holds() const
{
  for (const auto &r : rows)
  {
    if (r.ratio <= 0.95 && !(r.bounded && r.level < 0.0 && r.stable()))
    {
      return false;
    }
    if (r.ratio >= 1.05 && !(!r.bounded && r.stable()))
    {
      return false;
    }
  }
  return true;
}

CriticalMassTable run_critical_mass(const Polygon &polygon, const std::vector<double> &mus,
                                    const ExperimentConfig &config)
{
  constexpr double p = 4.0;
  CriticalMassTable table;
  table.mu_bar_alpha = critical_mass(smallest_angle(polygon).angle);
  const auto space = FemSpace::create(mesh_for_energy(polygon, config));
  FlowParams halved = config.flow;
  halved.tau *= 0.5;
  table.rows = parallel_map<CriticalMassRow>(mus.size(), [&](std::size_t i) {
    CriticalMassRow row;
    row.mu = mus[i];
    row.ratio = mus[i] / table.mu_bar_alpha;
    const auto r = solve_energy(space, p, mus[i], config.seed, config.flow);
    if (const auto *gs = std::get_if<GroundState>(&r))
    {
      row.bounded = true;
      row.level = gs->level;
      row.lambda_u = gs->lambda;
      row.start_label = gs->start_label;
    }
    else
    {
      row.start_label = std::get<Unbounded>(r).start_label;
    }
    row.bounded_halved =
        std::holds_alternative<GroundState>(solve_energy(space, p, mus[i], config.seed, halved));
    return row;
  });
  return table;
}

CrossSolverResult run_cross_solver(const Polygon &polygon, double p, double mu,
                                   const ExperimentConfig &config)
{
  const auto space = FemSpace::create(mesh_for_energy(polygon, config));
  const auto r = solve_energy(space, p, mu, config.seed, config.flow);
  const auto *gs = std::get_if<GroundState>(&r);
  if (!gs)
  {
    throw SolverFailure("cross-solver check: energy is unbounded at mu = " + format_double(mu));
  }
  CrossSolverResult out;
  out.mu = mu;
  out.lambda_u = gs->lambda;
  out.energy_level = gs->level;
  out.energy_start = gs->start_label;
  const auto a = solve_action(space, p, gs->lambda, config.seed, config);
  out.action_mass = a.best.mass;
  out.action_start = a.best.start_label;
  out.relative_error = std::abs(out.action_mass - mu) / mu;
  return out;
}

SectorLevelResult run_sector_level(double alpha, double lambda, const ExperimentConfig &config)
{
  constexpr double p = 4.0;
  const double s = 1.0 / std::sqrt(lambda);
  const SectorSpec spec{alpha, config.sector_radius_factor * s};
  const auto space =
      FemSpace::create(graded_sector_mesh(spec, config.sector_coarse_h * s,
                                          config.apex_h_factor * s, config.sector_fine_factor * s));
  const std::vector<LabeledStart> starts{
      {"apex", nehari_project(soliton_field(townes_profile(), lambda, {0.0, 0.0}, space), lambda, p)}};
  const auto r = minimize_action(starts, lambda, p, config.action);
  SectorLevelResult out;
  out.alpha = alpha;
  out.lambda = lambda;
  out.level = r.best.level;
  out.ratio = r.best.level / (lambda * mu_bar() / 2.0);
  out.expected = std::min(alpha, std::numbers::pi) / (2 * std::numbers::pi);
  out.relative_error = std::abs(out.ratio - out.expected) / out.expected;
  out.mass = r.best.mass;
  out.nodes = space->size();
  return out;
}

void write_lambda_csv(std::ostream &out, const std::vector<SweepRecord> &records)
{
  CsvWriter csv(out, {"lambda", "level", "m_lo", "m_hi", "starts_converged", "nehari_residual"});
  for (const auto &r : records)
  {
    csv.row({format_double(r.parameter), cell(r.level), cell(r.m_lo), cell(r.m_hi),
             r.ok ? std::to_string(r.starts_converged) : "", cell(r.nehari_residual)});
  }
}

void write_mass_csv(std::ostream &out, const std::vector<SweepRecord> &records)
{
  CsvWriter csv(out, {"mu", "level", "lambda_u", "residual", "iterations", "start", "unbounded",
                      "jump"});
  for (const auto &r : records)
  {
    const bool bounded = r.ok && !r.unbounded;
    csv.row({format_double(r.parameter), bounded ? cell(r.level) : "",
             bounded ? cell(r.lambda_u) : "", bounded ? cell(r.residual) : "",
             r.ok ? std::to_string(r.iterations) : "", r.start_label, r.unbounded ? "1" : "0",
             r.flagged ? "1" : "0"});
  }
}

void write_asymptotics_csv(std::ostream &out, const AsymptoticsTable &table)
{
  CsvWriter csv(out, {"lambda", "level", "reference", "gap", "mass", "mass_error"});
  for (const auto &r : table.rows)
  {
    csv.row({format_double(r.lambda), format_double(r.level), format_double(r.reference),
             format_double(r.gap), format_double(r.mass), format_double(r.mass_error)});
  }
}

void write_critical_mass_csv(std::ostream &out, const CriticalMassTable &table)
{
  CsvWriter csv(out, {"mu", "ratio", "verdict", "level", "lambda_u", "verdict_halved_tau"});
  for (const auto &r : table.rows)
  {
    csv.row({format_double(r.mu), format_double(r.ratio), r.bounded ? "bounded" : "unbounded",
             r.bounded ? cell(r.level) : "", r.bounded ? cell(r.lambda_u) : "",
             r.bounded_halved ? "bounded" : "unbounded"});
  }
}

}  // namespace nlsgs
