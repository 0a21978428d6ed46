#include "nlsgs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlsgs/errors.hpp"

namespace nlsgs {

double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += a[i] * b[i];
  }
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SparseSym::SparseSym(std::size_t dimension, std::vector<Triplet> entries)
{
  for (const auto &e : entries)
  {
    if (e.row < 0 || e.col < 0 || static_cast<std::size_t>(e.row) >= dimension ||
        static_cast<std::size_t>(e.col) >= dimension)
    {
      throw DimensionMismatch("sparse entry outside the matrix");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet &a, const Triplet &b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(dimension + 1, 0);
  for (std::size_t k = 0; k < entries.size();)
  {
    const int r = entries[k].row;
    const int c = entries[k].col;
    double v = 0.0;
    while (k < entries.size() && entries[k].row == r && entries[k].col == c)
    {
      v += entries[k].value;
      ++k;
    }
    cols_.push_back(c);
    values_.push_back(v);
    ++row_ptr_[static_cast<std::size_t>(r) + 1];
  }
  for (std::size_t r = 0; r < dimension; ++r)
  {
    row_ptr_[r + 1] += row_ptr_[r];
  }
  for (std::size_t r = 0; r < dimension; ++r)
  {
    bool any = false;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
    {
      any = any || values_[k] != 0.0;
      const double mirror = at(static_cast<std::size_t>(cols_[k]), r);
      const double scale = std::max(std::abs(values_[k]), 1.0);
      if (std::abs(values_[k] - mirror) > 1e-12 * scale)
      {
        throw InvalidInput("matrix is not symmetric at (" + std::to_string(r) + ", " +
                           std::to_string(cols_[k]) + ")");
      }
    }
    if (!any)
    {
      throw InvalidInput("matrix row " + std::to_string(r) + " is identically zero");
    }
  }
}

SparseSym SparseSym::identity(std::size_t dimension)
{
  std::vector<Triplet> t;
  t.reserve(dimension);
  for (std::size_t i = 0; i < dimension; ++i)
  {
    t.push_back({static_cast<int>(i), static_cast<int>(i), 1.0});
  }
  return SparseSym(dimension, std::move(t));
}

SparseSym SparseSym::from_dense(std::size_t dimension, std::span<const double> row_major)
{
  if (row_major.size() != dimension * dimension)
  {
    throw DimensionMismatch("dense matrix size does not match dimension");
  }
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < dimension; ++i)
  {
    for (std::size_t j = 0; j < dimension; ++j)
    {
      const double v = row_major[i * dimension + j];
      if (v != 0.0)
      {
        t.push_back({static_cast<int>(i), static_cast<int>(j), v});
      }
    }
  }
  return SparseSym(dimension, std::move(t));
}

double SparseSym::at(std::size_t row, std::size_t col) const
{
  const auto begin = cols_.begin() + row_ptr_[row];
  const auto end = cols_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(begin, end, static_cast<int>(col));
  if (it == end || *it != static_cast<int>(col))
  {
    return 0.0;
  }
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

std::vector<double> SparseSym::diagonal() const
{
  std::vector<double> d(dimension(), 0.0);
  for (std::size_t r = 0; r < d.size(); ++r)
  {
    d[r] = at(r, r);
  }
  return d;
}

std::vector<double> SparseSym::row_sums() const
{
  std::vector<double> s(dimension(), 0.0);
  for (std::size_t r = 0; r < s.size(); ++r)
  {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
    {
      s[r] += values_[k];
    }
  }
  return s;
}

SparseSym SparseSym::combine(double a, const SparseSym &A, double b, const SparseSym &B)
{
  if (A.row_ptr_ != B.row_ptr_ || A.cols_ != B.cols_)
  {
    throw DimensionMismatch("combine requires a shared sparsity pattern");
  }
  SparseSym C;
  C.row_ptr_ = A.row_ptr_;
  C.cols_ = A.cols_;
  C.values_.resize(A.values_.size());
  for (std::size_t k = 0; k < C.values_.size(); ++k)
  {
    C.values_[k] = a * A.values_[k] + b * B.values_[k];
  }
  return C;
}

double SparseSym::quadratic_form(std::span<const double> x) const
{
  if (x.size() != dimension())
  {
    throw DimensionMismatch("quadratic form: vector length mismatch");
  }
  double s = 0.0;
  for (std::size_t r = 0; r < x.size(); ++r)
  {
    double row = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
    {
      row += values_[k] * x[cols_[k]];
    }
    s += x[r] * row;
  }
  return s;
}

void matvec_into(const SparseSym &A, std::span<const double> x, std::span<double> y)
{
  const std::size_t n = A.dimension();
  if (x.size() != n || y.size() != n)
  {
    throw DimensionMismatch("matvec: vector length mismatch");
  }
  const auto &rp = A.row_ptr();
  const auto &cols = A.cols();
  const auto &vals = A.values();
  for (std::size_t r = 0; r < n; ++r)
  {
    double s = 0.0;
    for (int k = rp[r]; k < rp[r + 1]; ++k)
    {
      s += vals[k] * x[cols[k]];
    }
    y[r] = s;
  }
}

std::vector<double> matvec(const SparseSym &A, std::span<const double> x)
{
  std::vector<double> y(A.dimension());
  matvec_into(A, x, y);
  return y;
}

std::vector<double> solve_cg(const SparseSym &A, std::span<const double> b, double shift,
                             const CgOptions &options, CgStats *stats)
{
  const std::size_t n = A.dimension();
  if (b.size() != n)
  {
    throw DimensionMismatch("solve_cg: right-hand side length mismatch");
  }
  if (shift < 0.0)
  {
    throw InvalidInput("solve_cg: shift must be non-negative");
  }
  const int max_iter = options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * n);
  const double bnorm = norm2(b);
  std::vector<double> x(n, 0.0);
  if (stats)
  {
    *stats = {};
  }
  if (bnorm == 0.0)
  {
    return x;
  }

  if (shift == 0.0)
  {
    // Singular when constants are in the kernel (pure Neumann stiffness).
    const auto sums = A.row_sums();
    double scale = 0.0;
    for (const double v : A.values())
    {
      scale = std::max(scale, std::abs(v));
    }
    double worst = 0.0;
    for (const double s : sums)
    {
      worst = std::max(worst, std::abs(s));
    }
    if (worst <= 1e-12 * scale)
    {
      double total = 0.0;
      double l1 = 0.0;
      for (const double v : b)
      {
        total += v;
        l1 += std::abs(v);
      }
      if (std::abs(total) > 1e-10 * l1)
      {
        throw SingularSystem("right-hand side is not orthogonal to the constant null space");
      }
    }
  }

  auto diag = A.diagonal();
  for (auto &d : diag)
  {
    d += shift;
    if (!(d > 0.0))
    {
      throw InvalidInput("solve_cg: non-positive diagonal, matrix is not SPD");
    }
  }

  if (!options.x0.empty())
  {
    if (options.x0.size() != n)
    {
      throw DimensionMismatch("solve_cg: initial guess length mismatch");
    }
    std::copy(options.x0.begin(), options.x0.end(), x.begin());
  }

  std::vector<double> r(n);
  std::vector<double> z(n);
  std::vector<double> p(n);
  std::vector<double> q(n);
  matvec_into(A, x, q);
  for (std::size_t i = 0; i < n; ++i)
  {
    r[i] = b[i] - q[i] - shift * x[i];
    z[i] = r[i] / diag[i];
  }
  p = z;
  double rz = dot(r, z);

  // Minimal-residual smoothing (Zhou & Walker): y carries the reported iterate.
  std::vector<double> y = x;
  std::vector<double> s = r;
  double snorm = norm2(s);
  if (stats && options.keep_history)
  {
    stats->residual_history.push_back(snorm / bnorm);
  }

  int it = 0;
  while (snorm > options.tol * bnorm)
  {
    if (it >= max_iter)
    {
      if (stats)
      {
        stats->iterations = it;
        stats->relative_residual = snorm / bnorm;
      }
      throw NoConvergence("conjugate gradients did not converge in " + std::to_string(max_iter) +
                              " iterations",
                          it, snorm / bnorm);
    }
    ++it;
    matvec_into(A, p, q);
    for (std::size_t i = 0; i < n; ++i)
    {
      q[i] += shift * p[i];
    }
    const double pq = dot(p, q);
    if (!(pq > 0.0))
    {
      // Direction in the null space: the remaining residual cannot be reduced.
      throw NoConvergence("conjugate gradients broke down (non-positive curvature)", it,
                          snorm / bnorm);
    }
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i)
    {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      z[i] = r[i] / diag[i];
    }
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i)
    {
      p[i] = z[i] + beta * p[i];
    }

    double dd = 0.0;
    double sd = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      const double d = r[i] - s[i];
      dd += d * d;
      sd += s[i] * d;
    }
    const double eta = dd > 0.0 ? -sd / dd : 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      s[i] += eta * (r[i] - s[i]);
      y[i] += eta * (x[i] - y[i]);
    }
    snorm = norm2(s);
    if (stats && options.keep_history)
    {
      stats->residual_history.push_back(snorm / bnorm);
    }
  }
  if (stats)
  {
    stats->iterations = it;
    stats->relative_residual = snorm / bnorm;
  }
  return y;
}

}  // namespace nlsgs
