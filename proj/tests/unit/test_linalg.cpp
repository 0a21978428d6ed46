#include <cmath>
#include <random>

#include "doctest.h"

#include "dense.hpp"
#include "nlsgs/errors.hpp"
#include "nlsgs/linalg.hpp"
#include "support.hpp"

using namespace nlsgs;

namespace {

/// Random sparse SPD matrix: a banded symmetric part made diagonally dominant.
std::pair<SparseSym, oracle::Dense> random_spd(std::size_t n, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  oracle::Dense d(n);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = i + 1; j < std::min(n, i + 4); ++j)
    {
      const double v = u(rng);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
    {
      s += std::abs(d(i, j));
    }
    d(i, i) = s + 0.1 + std::abs(u(rng));
    for (std::size_t j = 0; j < n; ++j)
    {
      if (d(i, j) != 0.0)
      {
        t.push_back({static_cast<int>(i), static_cast<int>(j), d(i, j)});
      }
    }
  }
  return {SparseSym(n, std::move(t)), d};
}

SparseSym laplacian_1d(std::size_t n)
{
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
  {
    const int k = static_cast<int>(i);
    t.push_back({k, k, (i == 0 || i + 1 == n) ? 1.0 : 2.0});
    if (i + 1 < n)
    {
      t.push_back({k, k + 1, -1.0});
      t.push_back({k + 1, k, -1.0});
    }
  }
  return SparseSym(n, std::move(t));
}

double relative_residual(const SparseSym &A, double shift, const std::vector<double> &x,
                         const std::vector<double> &b)
{
  auto r = matvec(A, x);
  for (std::size_t i = 0; i < r.size(); ++i)
  {
    r[i] += shift * x[i] - b[i];
  }
  return norm2(r) / norm2(b);
}

}  // namespace

TEST_CASE("sparse construction")
{
  const SparseSym a(2, {{0, 0, 1.0}, {0, 0, 1.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 2.0}});
  CHECK(a.at(0, 0) == 2.0);
  CHECK(a.at(1, 0) == -1.0);
  CHECK(a.nonzeros() == 4);
  CHECK(a.row_sums() == std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(SparseSym(2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}}), InvalidInput);
  CHECK_THROWS_AS(SparseSym(2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 2.0}, {1, 1, 1.0}}),
                  InvalidInput);
  CHECK_THROWS_AS(SparseSym(2, {{0, 0, 1.0}}), InvalidInput);
  CHECK_THROWS_AS(SparseSym(2, {{0, 2, 1.0}}), DimensionMismatch);
  const auto d = SparseSym::from_dense(2, std::vector<double>{2, -1, -1, 2});
  CHECK(d.quadratic_form(std::vector<double>{1, 1}) == 2.0);
  CHECK_THROWS_AS(SparseSym::from_dense(2, std::vector<double>{1, 2, 3}), DimensionMismatch);
  const auto c = SparseSym::combine(2.0, d, -1.0, d);
  CHECK(c.values() == d.values());
  CHECK_THROWS_AS(SparseSym::combine(1.0, d, 1.0, SparseSym::identity(2)), DimensionMismatch);
}

TEST_CASE("matvec")
{
  const std::vector<double> x{0.5, -2.0, 3.0};
  CHECK(matvec(SparseSym::identity(3), x) == x);
  const auto a = SparseSym::from_dense(2, std::vector<double>{2, -1, -1, 2});
  CHECK(matvec(a, std::vector<double>{1, 1}) == std::vector<double>{1, 1});
  CHECK_THROWS_AS(matvec(a, x), DimensionMismatch);

  std::mt19937_64 rng(11);
  const auto [s, d] = random_spd(50, rng);
  const auto v = testing::random_vector(50, rng);
  const auto y = matvec(s, v);
  const auto ref = oracle::dense_matvec(d, v);
  for (std::size_t i = 0; i < 50; ++i)
  {
    CHECK(std::abs(y[i] - ref[i]) <= 1e-13 * std::max(1.0, std::abs(ref[i])));
  }
}

TEST_CASE("conjugate gradients")
{
  SUBCASE("identity in one iteration")
  {
    const std::vector<double> b{1.0, -3.0, 0.25, 8.0};
    CgStats stats;
    const auto x = solve_cg(SparseSym::identity(4), b, 0.0, {}, &stats);
    CHECK(stats.iterations == 1);
    for (std::size_t i = 0; i < b.size(); ++i)
    {
      CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-14));
    }
  }
  SUBCASE("shifted 1D Laplacian against a dense solve")
  {
    const std::size_t n = 100;
    const auto a = laplacian_1d(n);
    oracle::Dense d(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      for (std::size_t j = 0; j < n; ++j)
      {
        d(i, j) = a.at(i, j) + (i == j ? 0.01 : 0.0);
      }
    }
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      b[i] = std::sin(0.1 * static_cast<double>(i)) + 0.5;
    }
    CgOptions opt;
    opt.tol = 1e-12;
    const auto x = solve_cg(a, b, 0.01, opt);
    const auto ref = oracle::dense_solve(d, b);
    double err = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      err = std::max(err, std::abs(x[i] - ref[i]));
      scale = std::max(scale, std::abs(ref[i]));
    }
    CHECK(err <= 1e-8 * scale);
    CHECK(relative_residual(a, 0.01, x, b) <= 1e-12);
  }
  SUBCASE("pure Neumann stiffness")
  {
    const auto s = testing::square_space(0.25)->stiffness();
    const std::vector<double> zero(s.dimension(), 0.0);
    const auto x = solve_cg(s, zero);
    CHECK(norm2(x) == 0.0);
    std::vector<double> b(s.dimension(), 0.0);
    b[0] = 1.0;
    CHECK_THROWS_AS(solve_cg(s, b), SingularSystem);
    b[1] = -1.0;
    const auto y = solve_cg(s, b);
    CHECK(relative_residual(s, 0.0, y, b) <= 1e-10);
  }
  SUBCASE("failures")
  {
    const auto a = laplacian_1d(200);
    std::vector<double> b(200, 1.0);
    CgOptions opt;
    opt.max_iter = 2;
    try
    {
      solve_cg(a, b, 1e-4, opt);
      FAIL("expected NoConvergence");
    }
    catch (const NoConvergence &e)
    {
      CHECK(e.iterations() == 2);
      CHECK(e.last_residual() > 0.0);
    }
    CHECK_THROWS_AS(solve_cg(a, std::vector<double>(3, 1.0)), DimensionMismatch);
    CHECK_THROWS_AS(solve_cg(a, b, -1.0), InvalidInput);
  }
}

TEST_CASE("residual history never increases")
{
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k)
  {
    const auto [a, d] = random_spd(120, rng);
    const auto b = testing::random_vector(120, rng);
    CgOptions opt;
    opt.keep_history = true;
    opt.tol = 1e-13;
    CgStats stats;
    solve_cg(a, b, 0.0, opt, &stats);
    REQUIRE(stats.residual_history.size() >= 2);
    for (std::size_t i = 1; i < stats.residual_history.size(); ++i)
    {
      CHECK(stats.residual_history[i] <= stats.residual_history[i - 1] * (1 + 1e-12));
    }
  }
  // An ill-conditioned FEM system, where plain CG residuals oscillate.
  const auto space = testing::square_space(1.0 / 32);
  const auto a = space->shifted(1e-3);
  std::vector<double> b(a.dimension());
  for (std::size_t i = 0; i < b.size(); ++i)
  {
    b[i] = std::cos(7.0 * space->mesh().nodes()[i].x) + 0.3;
  }
  CgOptions opt;
  opt.keep_history = true;
  CgStats stats;
  solve_cg(a, b, 0.0, opt, &stats);
  for (std::size_t i = 1; i < stats.residual_history.size(); ++i)
  {
    CHECK(stats.residual_history[i] <= stats.residual_history[i - 1] * (1 + 1e-12));
  }
}

TEST_CASE("solve then multiply round trip on random SPD systems")
{
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 200);
  for (int k = 0; k < 100; ++k)
  {
    const auto n = static_cast<std::size_t>(size(rng));
    const auto [a, d] = random_spd(n, rng);
    const auto b = testing::random_vector(n, rng);
    CgOptions opt;
    opt.tol = 1e-10;
    CgStats stats;
    const auto x = solve_cg(a, b, 0.0, opt, &stats);
    CHECK(relative_residual(a, 0.0, x, b) <= 1e-10);
    CHECK(stats.relative_residual <= 1e-10);
  }
}

TEST_CASE("vector helpers")
{
  const std::vector<double> a{3.0, 4.0};
  CHECK(norm2(a) == 5.0);
  CHECK(dot(a, std::vector<double>{1.0, -1.0}) == -1.0);
}
