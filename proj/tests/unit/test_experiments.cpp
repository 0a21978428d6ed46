#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "nlsgs/errors.hpp"
#include "nlsgs/experiments.hpp"
#include "nlsgs/report.hpp"
#include "support.hpp"

using namespace nlsgs;
using std::numbers::pi;

namespace {

SweepRecord record(double parameter, double m_lo, double m_hi, double noise = 0.0)
{
  SweepRecord r;
  r.parameter = parameter;
  r.ok = true;
  r.m_lo = m_lo;
  r.m_hi = m_hi;
  r.mass = m_lo;
  r.noise = noise;
  r.branch = "flat";
  return r;
}

std::string first_line(const std::string &s) { return s.substr(0, s.find('\n')); }

ExperimentConfig quick()
{
  ExperimentConfig c;
  c.h = 1.0 / 16;
  c.noise_solves = 2;
  return c;
}

}  // namespace

TEST_CASE("grid parsing")
{
  CHECK(parse_grid("1:3:3") == std::vector<double>{1.0, 2.0, 3.0});
  const auto g = parse_grid("1:100:3:geom");
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(g[2] == 100.0);
  CHECK(parse_grid("2:5:0").empty());
  CHECK(parse_grid("2:5:1") == std::vector<double>{2.0});
  CHECK_THROWS_AS(parse_grid("1:3"), InvalidInput);
  CHECK_THROWS_AS(parse_grid("1:3:4:log"), InvalidInput);
  CHECK_THROWS_AS(parse_grid("3:1:4"), InvalidInput);
  CHECK_THROWS_AS(parse_grid("0:1:4:geom"), InvalidInput);
  CHECK_THROWS_AS(parse_grid("a:1:4"), InvalidInput);
  CHECK_THROWS_AS(parse_grid("1:2:-1"), InvalidInput);
}

TEST_CASE("config parsing")
{
  std::istringstream in("# comment\np = 3.9\nflow.tau=0.005  # trailing\n\naction.tol = 1e-8\nseed = 4\n");
  const auto kv = parse_key_values(in);
  CHECK(kv.size() == 4);
  const auto c = ExperimentConfig::from_map(kv);
  CHECK(c.p == 3.9);
  CHECK(c.flow.tau == 0.005);
  CHECK(c.action.tol == 1e-8);
  CHECK(c.seed == 4);
  CHECK_THROWS_AS(ExperimentConfig::from_map({{"colour", "red"}}), InvalidInput);
  CHECK_THROWS_AS(ExperimentConfig::from_map({{"p", "four"}}), InvalidInput);
  std::istringstream repeated("p = 3\np = 4\n");
  CHECK_THROWS_AS(parse_key_values(repeated), InvalidInput);
  std::istringstream malformed("p 3\n");
  CHECK_THROWS_AS(parse_key_values(malformed), InvalidInput);
  CHECK_THROWS_AS(load_key_values("/nonexistent/config.txt"), InvalidInput);
}

TEST_CASE("non-monotone witness detection")
{
  std::vector<SweepRecord> inc{record(1, 1.0, 1.0, 0.01), record(2, 1.1, 1.1, 0.01),
                               record(3, 1.2, 1.2, 0.01)};
  CHECK_FALSE(detect_nonmonotone(inc).has_value());

  std::vector<SweepRecord> rs{record(1, 1.0, 1.0), record(2, 1.3, 1.3), record(3, 1.1, 1.1)};
  const auto w = detect_nonmonotone(rs, 3.0, 0.01);
  REQUIRE(w.has_value());
  CHECK(w->lambda1 == 2.0);
  CHECK(w->lambda2 == 3.0);
  CHECK(w->margin == doctest::Approx(0.2));
  CHECK(w->m1 == 1.3);
  CHECK(w->m2 == 1.1);
  // The margin must exceed the noise factor.
  CHECK_FALSE(detect_nonmonotone(rs, 3.0, 0.1).has_value());
  // Record noise is used when no explicit noise is given.
  rs[1].noise = 0.05;
  CHECK(detect_nonmonotone(rs).has_value());
  rs[2].noise = 0.07;
  CHECK_FALSE(detect_nonmonotone(rs).has_value());
  // Failed rows are skipped.
  rs[1].ok = false;
  CHECK_FALSE(detect_nonmonotone(rs, 3.0, 0.0).has_value());
}

TEST_CASE("derivative check on synthetic data")
{
  // J = lambda^2 / 4 + lambda has J' = lambda / 2 + 1 = mass / 2 with mass = lambda + 2.
  std::vector<SweepRecord> rs;
  for (double lam : {1.0, 1.5, 2.5, 4.0, 4.2})
  {
    auto r = record(lam, lam + 2, lam + 2);
    r.level = lam * lam / 4 + lam;
    r.mass = lam + 2;
    r.noise = 1e-9;
    rs.push_back(r);
  }
  auto rows = derivative_check(rs);
  REQUIRE(rows.size() == 3);
  for (const auto &row : rows)
  {
    CHECK(row.checked);
    CHECK(row.relative_error <= 1e-12);
  }
  rs[2].branch = "vertex-0";
  rows = derivative_check(rs);
  CHECK_FALSE(rows[0].checked);
  CHECK_FALSE(rows[1].checked);
  CHECK_FALSE(rows[2].checked);
  rs[2].branch = "flat";
  rs[3].m_hi = rs[3].m_lo + 1.0;
  rows = derivative_check(rs);
  CHECK(rows[0].checked);
  CHECK_FALSE(rows[2].checked);
}

TEST_CASE("jump intervals")
{
  std::vector<SweepRecord> rs{record(1, 0, 0), record(2, 0, 0), record(3, 0, 0), record(4, 0, 0)};
  rs[1].flagged = true;
  rs[2].unbounded = true;
  const auto j = jump_intervals(rs);
  REQUIRE(j.size() == 1);
  CHECK(j[0] == std::pair<double, double>{2.0, 4.0});
}

TEST_CASE("critical-mass verdict logic")
{
  CriticalMassTable t;
  t.rows.push_back({0.5, 0.5, true, -1.0, 2.0, "constant", true});
  t.rows.push_back({1.0, 1.0, false, SweepRecord::nan, SweepRecord::nan, "vertex-0", true});
  t.rows.push_back({1.5, 1.5, false, SweepRecord::nan, SweepRecord::nan, "vertex-0", false});
  CHECK(t.dichotomy_holds());
  t.rows[2].bounded_halved = true;
  CHECK_FALSE(t.dichotomy_holds());
  t.rows[2].bounded_halved = false;
  t.rows[0].level = 0.1;
  CHECK_FALSE(t.dichotomy_holds());
}

TEST_CASE("branch classification")
{
  const auto space = testing::triangle_space(1.0 / 16);
  CHECK(classify_branch(Field::constant(space, 2.0)) == "flat");
  const auto corners = mesh_corners(space->mesh());
  REQUIRE(corners.size() == 3);
  CHECK(classify_branch(soliton_field(townes_profile(), 100.0, corners[2].point, space)) ==
        "vertex-2");
  const Point2 centre{0.5, std::sqrt(3.0) / 6};
  CHECK(classify_branch(soliton_field(townes_profile(), 100.0, centre, space)) == "interior");
}

TEST_CASE("mesh policy for a frequency")
{
  ExperimentConfig c;
  c.h = 1.0 / 16;
  const auto poly = builtin::equilateral();
  const Point2 apex = poly[smallest_angle(poly).vertex];
  const auto m = mesh_for_lambda(poly, 40.0, c);
  CHECK(audit_edges(m).conforming());
  double apex_h = 0.0;
  for (const auto &t : m.triangles())
  {
    for (int k = 0; k < 3; ++k)
    {
      if (distance(m.nodes()[static_cast<std::size_t>(t[k])], apex) < 1e-14)
      {
        const auto &a = m.nodes()[static_cast<std::size_t>(t[0])];
        const auto &b = m.nodes()[static_cast<std::size_t>(t[1])];
        const auto &d = m.nodes()[static_cast<std::size_t>(t[2])];
        apex_h = std::max({apex_h, distance(a, b), distance(b, d), distance(d, a)});
      }
    }
  }
  CHECK(apex_h > 0.0);
  CHECK(apex_h <= 0.1 / std::sqrt(40.0));
  CHECK(mesh_for_energy(builtin::equilateral(), c).node_count() ==
        triangulate(builtin::equilateral(), c.h).node_count());
}

TEST_CASE("lambda sweep")
{
  const auto space = testing::triangle_space(1.0 / 16);
  const auto cfg = quick();
  CHECK(sweep_lambda(space, 4.0, {}, cfg).empty());
  const auto grid = parse_grid("2:14:4");
  const auto rs = sweep_lambda(space, 4.0, grid, cfg);
  REQUIRE(rs.size() == 4);
  for (std::size_t i = 0; i < rs.size(); ++i)
  {
    CHECK(rs[i].ok);
    CHECK(rs[i].parameter == grid[i]);
    CHECK(rs[i].starts_converged >= 1);
    CHECK(rs[i].nehari_residual <= 1e-10);
    CHECK(rs[i].m_lo <= rs[i].m_hi);
    CHECK(rs[i].noise >= cfg.noise_floor * rs[i].mass);
    if (i > 0)
    {
      CHECK(rs[i].level > rs[i - 1].level);
    }
  }
  CHECK_THROWS_AS(sweep_lambda(space, 4.0, {2.0, 1.0}, cfg), InvalidInput);
  CHECK_THROWS_AS(sweep_lambda(space, 4.0, {-1.0}, cfg), NonPositiveLambda);

  std::ostringstream a;
  std::ostringstream b;
  write_lambda_csv(a, rs);
  write_lambda_csv(b, sweep_lambda(space, 4.0, grid, cfg));
  CHECK(a.str() == b.str());
  CHECK(first_line(a.str()) == "lambda,level,m_lo,m_hi,starts_converged,nehari_residual");
}

TEST_CASE("mass sweep")
{
  const auto space = testing::triangle_space(1.0 / 16);
  const auto cfg = quick();
  const auto grid = parse_grid("0.2:1.6:6");
  const auto rs = sweep_mass(space, 3.5, grid, cfg);
  REQUIRE(rs.size() == 6);
  double min_lambda = std::numeric_limits<double>::infinity();
  for (const auto &r : rs)
  {
    REQUIRE(r.ok);
    CHECK_FALSE(r.unbounded);
    CHECK(r.lambda_u > 0.0);
    min_lambda = std::min(min_lambda, r.lambda_u);
  }
  CHECK(rs.front().lambda_u == min_lambda);
  for (std::size_t i = 1; i < rs.size(); ++i)
  {
    CHECK(rs[i].level < rs[i - 1].level);
    if (!rs[i - 1].flagged)
    {
      CHECK(rs[i].lambda_u > rs[i - 1].lambda_u);
    }
  }
  std::ostringstream out;
  write_mass_csv(out, rs);
  CHECK(first_line(out.str()) == "mu,level,lambda_u,residual,iterations,start,unbounded,jump");
  CHECK_THROWS_AS(sweep_mass(space, 3.5, {1.0, 0.5}, cfg), InvalidInput);
}

TEST_CASE("multiplier grows without bound for subcritical exponents")
{
  const auto space = testing::square_space(0.125);
  ExperimentConfig cfg = quick();
  cfg.noise_solves = 1;
  const auto rs = sweep_mass(space, 3.0, {1.0, 10.0, 100.0}, cfg);
  REQUIRE(rs.size() == 3);
  for (const auto &r : rs)
  {
    REQUIRE(r.ok);
  }
  CHECK(rs[1].lambda_u > rs[0].lambda_u);
  CHECK(rs[2].lambda_u > rs[1].lambda_u);
  CHECK(rs[2].lambda_u > 10.0);
}

TEST_CASE("asymptotics table with a single frequency")
{
  auto cfg = quick();
  const auto t = run_asymptotics(builtin::equilateral(), {5.0}, cfg);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.gap_decreasing);
  CHECK(t.mass_error_decreasing);
  CHECK(t.alpha == doctest::Approx(pi / 3));
  CHECK(t.rows[0].reference == doctest::Approx(5.0 * mu_bar() / 12));
  std::ostringstream out;
  write_asymptotics_csv(out, t);
  CHECK(first_line(out.str()) == "lambda,level,reference,gap,mass,mass_error");
  CHECK_THROWS_AS(run_asymptotics(builtin::equilateral(), {5.0, 5.0}, cfg), InvalidInput);
}

TEST_CASE("critical-mass CSV")
{
  CriticalMassTable t;
  t.rows.push_back({0.5, 0.25, true, -1.0, 2.0, "constant", true});
  t.rows.push_back({3.0, 1.5, false, SweepRecord::nan, SweepRecord::nan, "vertex-0", false});
  std::ostringstream out;
  write_critical_mass_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "mu,ratio,verdict,level,lambda_u,verdict_halved_tau");
  std::getline(in, line);
  CHECK(line == "0.5,0.25,bounded,-1,2,bounded");
  std::getline(in, line);
  CHECK(line == "3,1.5,unbounded,,,unbounded");
}

TEST_CASE("CSV writer and number formatting")
{
  std::ostringstream out;
  CsvWriter csv(out, {"a", "b"});
  csv.row({"1", "2"});
  CHECK_THROWS_AS(csv.row({"1"}), DimensionMismatch);
  CHECK(out.str() == "a,b\n1,2\n");
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, mu_bar()})
  {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("SVG charts")
{
  std::ostringstream out;
  write_svg_chart(out, {{"mass", {1, 2, 4}, {1.0, 0.5, std::nan("")}}, {"empty", {}, {}}},
                  {"M(lambda) <test>", "lambda", "mass", true});
  const auto s = out.str();
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("&lt;test&gt;") != std::string::npos);
  CHECK(s.find("<path") != std::string::npos);
}
