#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"

#include "finite_diff.hpp"
#include "monomials.hpp"
#include "nlsgs/action_min.hpp"
#include "nlsgs/errors.hpp"
#include "nlsgs/fem.hpp"
#include "nlsgs/soliton.hpp"
#include "support.hpp"

using namespace nlsgs;
using std::numbers::pi;

namespace {

TriMesh right_triangle()
{
  return TriMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {{0, 1, 0}, {1, 2, 1}, {2, 0, 2}});
}

TriMesh scaled(const TriMesh &m, double s)
{
  std::vector<Point2> nodes;
  for (auto p : m.nodes())
  {
    nodes.push_back(s * p);
  }
  return TriMesh(nodes, m.triangles(), m.boundary_edges());
}

}  // namespace

TEST_CASE("quadrature rule")
{
  const auto q = Quadrature::degree5();
  CHECK(q.points.size() == 7);
  CHECK(q.degree == 5);
  double total = 0.0;
  for (double w : q.weights)
  {
    CHECK(w > 0.0);
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  // Exact for every monomial up to degree 5 on the reference triangle (area 1/2).
  for (int a = 0; a <= 5; ++a)
  {
    for (int b = 0; a + b <= 5; ++b)
    {
      double s = 0.0;
      for (std::size_t k = 0; k < q.points.size(); ++k)
      {
        const double x = q.points[k][1];
        const double y = q.points[k][2];
        s += q.weights[k] * std::pow(x, a) * std::pow(y, b);
      }
      CHECK(0.5 * s == doctest::Approx(oracle::reference_monomial(a, b)).epsilon(1e-14));
    }
  }
}

TEST_CASE("element stiffness of the unit right triangle")
{
  const auto s = assemble_stiffness(right_triangle());
  CHECK(s.at(0, 0) == doctest::Approx(1.0));
  CHECK(s.at(1, 1) == doctest::Approx(0.5));
  CHECK(s.at(2, 2) == doctest::Approx(0.5));
  CHECK(s.at(0, 1) == doctest::Approx(-0.5));
  CHECK(s.at(0, 2) == doctest::Approx(-0.5));
  CHECK(s.at(1, 2) == doctest::Approx(0.0));
}

TEST_CASE("element mass matrices")
{
  const auto m = right_triangle();
  const double area = 0.5;
  const auto c = assemble_mass(m, false);
  const auto l = assemble_mass(m, true);
  for (std::size_t i = 0; i < 3; ++i)
  {
    CHECK(c.at(i, i) == doctest::Approx(area / 6));
    CHECK(l.at(i, i) == doctest::Approx(area / 3));
    for (std::size_t j = 0; j < 3; ++j)
    {
      if (i != j)
      {
        CHECK(c.at(i, j) == doctest::Approx(area / 12));
      }
    }
  }
}

TEST_CASE("global operator identities")
{
  for (const auto &poly : {builtin::unit_square(), builtin::equilateral(), builtin::right345()})
  {
    const auto space = FemSpace::create(triangulate(poly, 0.07));
    const std::vector<double> one(space->size(), 1.0);
    double sup = 0.0;
    for (double v : matvec(space->stiffness(), one))
    {
      sup = std::max(sup, std::abs(v));
    }
    CHECK(sup <= 1e-12);
    CHECK(std::abs(space->mass().quadratic_form(one) - poly.area()) <= 1e-12 * poly.area());
    double lumped = 0.0;
    for (double v : space->lumped_mass())
    {
      lumped += v;
    }
    CHECK(std::abs(lumped - poly.area()) <= 1e-12 * poly.area());
    const double c = 1.7;
    CHECK(mass(Field::constant(space, c)) == doctest::Approx(c * c * poly.area()).epsilon(1e-12));
  }
  const auto sq = testing::square_space(0.1);
  std::vector<double> x(sq->size());
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    x[i] = sq->mesh().nodes()[i].x;
  }
  CHECK(dirichlet(Field(sq, x)) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("Lp integrals")
{
  const auto space = testing::triangle_space(0.1);
  for (double p : {2.5, 3.0, 3.7, 4.0})
  {
    const double c = -1.3;
    CHECK(lp_integral(Field::constant(space, c), p) ==
          doctest::Approx(std::pow(std::abs(c), p) * space->area()).epsilon(1e-13));
  }
  // Quartic of a linear function on one triangle is exact.
  const auto one = FemSpace::create(TriMesh({{0.2, 0.1}, {1.3, 0.4}, {0.5, 1.7}}, {{0, 1, 2}}, {}));
  const std::vector<double> v{0.7, -1.2, 2.1};
  const double exact = oracle::triangle_linear_power({v[0], v[1], v[2]}, one->area(), 4);
  CHECK(std::abs(lp_integral(Field(one, v), 4.0) - exact) <= 1e-13 * exact);

  std::mt19937_64 rng(3);
  const auto u = testing::smooth_random_field(space, rng, 0.0);
  for (double p : {2.2, 3.0, 4.0})
  {
    CHECK(lp_integral(u, p) == lp_integral(u.scaled(-1.0), p));
  }
  CHECK_THROWS_AS(lp_integral(u, 2.0), InvalidInput);
  CHECK_THROWS_AS(lp_integral(u, 4.5), InvalidInput);
}

TEST_CASE("energy and action")
{
  const auto space = testing::triangle_space(0.1);
  const double area = space->area();
  for (double p : {3.0, 4.0})
  {
    const double mu = 0.8;
    const auto u = Field::constant(space, std::sqrt(mu / area));
    CHECK(energy(u, p) ==
          doctest::Approx(-std::pow(mu, p / 2) / (p * std::pow(area, p / 2 - 1))).epsilon(1e-13));
    CHECK(lambda_of(u, p) ==
          doctest::Approx(std::pow(mu, p / 2 - 1) * std::pow(area, 1 - p / 2)).epsilon(1e-13));
  }
  const auto zero = Field::zeros(space);
  CHECK(energy(zero, 4.0) == 0.0);
  CHECK(action(zero, 3.0, 4.0) == 0.0);
  CHECK_THROWS_AS(lambda_of(zero, 4.0), ZeroMass);

  std::mt19937_64 rng(17);
  for (int k = 0; k < 10; ++k)
  {
    const auto u = testing::smooth_random_field(space, rng, 0.3);
    for (double p : {2.6, 3.5, 4.0})
    {
      const double lam = 2.5;
      const double lhs = action(u, lam, p) - energy(u, p);
      CHECK(std::abs(lhs - 0.5 * lam * mass(u)) <= 1e-12 * std::abs(lhs));
      const auto w = u.scaled(-1.0);
      CHECK(energy(w, p) == energy(u, p));
      CHECK(action(w, lam, p) == action(u, lam, p));
      CHECK(lambda_of(w, p) == lambda_of(u, p));
      const double lu = lambda_of(u, p);
      const double ident = energy(u, p) + 0.5 * lu * mass(u);
      CHECK(std::abs(action(u, lu, p) - ident) <= 1e-12 * std::abs(ident));
      const auto v = nehari_project(u, lam, p);
      const double lp = lp_integral(v, p);
      CHECK(std::abs(action(v, lam, p) - (p - 2) / (2 * p) * lp) <= 1e-10 * lp);
    }
  }
}

TEST_CASE("p = 4 scaling of the energy")
{
  // u_s(x) = s u(s x) lives on the mesh scaled by 1/s.
  const auto base = triangulate(builtin::equilateral(), 0.05);
  const auto space = FemSpace::create(base);
  const auto u = Field(space, [&] {
    std::vector<double> v(space->size());
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      v[i] = 10.0 * std::exp(-8.0 * std::pow(norm(space->mesh().nodes()[i]), 2));
    }
    return v;
  }());
  REQUIRE(energy(u, 4.0) < 0.0);
  for (double s : {0.5, 2.0, 3.0})
  {
    const auto sspace = FemSpace::create(scaled(base, 1.0 / s));
    const auto us = Field(sspace, std::vector<double>(u.values().begin(), u.values().end())).scaled(s);
    CHECK(mass(us) == doctest::Approx(mass(u)).epsilon(1e-12));
    CHECK(energy(us, 4.0) == doctest::Approx(s * s * energy(u, 4.0)).epsilon(1e-2));
  }
}

TEST_CASE("gradients agree with central differences")
{
  const auto space = testing::square_space(0.125);
  std::mt19937_64 rng(99);
  for (int k = 0; k < 20; ++k)
  {
    const auto u = testing::smooth_random_field(space, rng, 0.5);
    const auto d = testing::random_vector(space->size(), rng);
    for (double p : {3.0, 3.9, 4.0})
    {
      const auto g = grad_energy(u, p);
      const double exact = dot(g, d);
      const double fd = oracle::five_point_directional(
          [&](const std::vector<double> &x) { return energy(Field(space, x), p); },
          std::vector<double>(u.values().begin(), u.values().end()), d, 1e-3);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::abs(exact));

      const double lam = 1.7;
      const double ea = dot(grad_action(u, lam, p), d);
      const double fa = oracle::five_point_directional(
          [&](const std::vector<double> &x) { return action(Field(space, x), lam, p); },
          std::vector<double>(u.values().begin(), u.values().end()), d, 1e-3);
      CHECK(std::abs(fa - ea) <= 1e-6 * std::abs(ea));
    }
  }
  const auto zero = grad_energy(Field::zeros(space), 4.0);
  CHECK(norm2(zero) == 0.0);
  const double c = 1.4;
  for (double p : {3.0, 4.0})
  {
    const auto g = grad_energy(Field::constant(space, c), p);
    const auto m1 = matvec(space->mass(), std::vector<double>(space->size(), 1.0));
    for (std::size_t i = 0; i < g.size(); ++i)
    {
      CHECK(g[i] == doctest::Approx(-std::pow(c, p - 1) * m1[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("discrete Gagliardo-Nirenberg ratio")
{
  // Fields vanishing on the boundary extend by zero to the plane, where the
  // sharp constant K2 = 2 / mu_bar bounds the ratio.
  const auto space = testing::square_space(1.0 / 16);
  const double k2 = gn_constant_k2();
  CHECK(k2 == doctest::Approx(2.0 / mu_bar()));
  std::mt19937_64 rng(500);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  std::vector<bool> on_boundary(space->size(), false);
  for (const auto &e : space->mesh().boundary_edges())
  {
    on_boundary[static_cast<std::size_t>(e.a)] = true;
    on_boundary[static_cast<std::size_t>(e.b)] = true;
  }
  double worst = 0.0;
  for (int k = 0; k < 500; ++k)
  {
    const Point2 c{0.2 + 0.6 * un(rng), 0.2 + 0.6 * un(rng)};
    const double w = 0.05 + 0.3 * un(rng);
    std::vector<double> v(space->size());
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      if (!on_boundary[i])
      {
        v[i] = std::exp(-std::pow(distance(space->mesh().nodes()[i], c) / w, 2)) +
               0.3 * (un(rng) - 0.5);
      }
    }
    const double r = gn_ratio(Field(space, v), 4.0);
    CHECK(r > 0.0);
    worst = std::max(worst, r);
  }
  MESSAGE("empirical discrete GN constant (p = 4): " << worst);
  CHECK(worst <= k2 * 1.05);
}

TEST_CASE("multiplier of an interpolated soliton")
{
  // A quarter plane with the soliton centred at the corner has the same
  // multiplier as the whole plane.
  const auto space =
      FemSpace::create(triangulate(testing::rectangle(0, 0, 10, 10), 10.0 * std::sqrt(2.0) / 128));
  const auto u = soliton_field(townes_profile(), 1.0, {0, 0}, space);
  CHECK(lambda_of(u, 4.0) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(4.0 * mass(u) == doctest::Approx(mu_bar()).epsilon(0.02));
}

TEST_CASE("field file format")
{
  const auto space = testing::triangle_space(0.5);
  std::mt19937_64 rng(1);
  const auto u = testing::smooth_random_field(space, rng);
  std::stringstream ss;
  write_field(ss, u);
  std::string head;
  std::getline(ss, head);
  CHECK(head == "field " + std::to_string(u.size()));
  ss.seekg(0);
  const auto back = read_field_values(ss);
  CHECK(back == std::vector<double>(u.values().begin(), u.values().end()));
  std::stringstream bad("fild 3\n1 2 3\n");
  CHECK_THROWS_AS(read_field_values(bad), InvalidInput);
  CHECK_THROWS_AS(Field(space, std::vector<double>(3, 0.0)), DimensionMismatch);
}

TEST_CASE("degenerate triangles are rejected by assembly")
{
  CHECK_THROWS_AS(TriMesh({{0, 0}, {0, 1}, {1, 0}}, {{0, 1, 2}}, {}), DegenerateTriangle);
}
