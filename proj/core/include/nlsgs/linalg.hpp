#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nlsgs {

struct Triplet
{
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Symmetric sparse matrix in compressed-row storage. Both triangles are
/// stored so that matvec is a plain row sweep.
class SparseSym
{
public:
  SparseSym() = default;
  /// Duplicate (row, col) entries are summed. Throws InvalidInput when the
  /// pattern or values are not symmetric, or a row is identically zero.
  SparseSym(std::size_t dimension, std::vector<Triplet> entries);

  static SparseSym identity(std::size_t dimension);
  static SparseSym from_dense(std::size_t dimension, std::span<const double> row_major);

  std::size_t dimension() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  const std::vector<int> &row_ptr() const noexcept { return row_ptr_; }
  const std::vector<int> &cols() const noexcept { return cols_; }
  const std::vector<double> &values() const noexcept { return values_; }

  double at(std::size_t row, std::size_t col) const;
  std::vector<double> diagonal() const;
  std::vector<double> row_sums() const;

  /// a*A + b*B for matrices sharing one sparsity pattern.
  static SparseSym combine(double a, const SparseSym &A, double b, const SparseSym &B);

  /// x^T A x
  double quadratic_form(std::span<const double> x) const;

private:
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<double> values_;
};

/// y = A x
std::vector<double> matvec(const SparseSym &A, std::span<const double> x);
void matvec_into(const SparseSym &A, std::span<const double> x, std::span<double> y);

struct CgOptions
{
  double tol = 1e-10;
  /// 0 selects 10 * dimension.
  int max_iter = 0;
  /// Optional starting guess (empty means zero).
  std::span<const double> x0 = {};
  /// Record the smoothed residual norm after every iteration.
  bool keep_history = false;
};

struct CgStats
{
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> residual_history;
};

/// Jacobi-preconditioned conjugate gradients for (A + shift I) v = b, with
/// minimal-residual smoothing of the iterates so the reported residual norm
/// never increases. Throws NoConvergence or SingularSystem.
std::vector<double> solve_cg(const SparseSym &A, std::span<const double> b, double shift = 0.0,
                             const CgOptions &options = {}, CgStats *stats = nullptr);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace nlsgs
