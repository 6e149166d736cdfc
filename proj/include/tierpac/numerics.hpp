#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace tierpac::numerics {

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  double max_abs() const;
  std::vector<double> multiply(std::span<const double> x) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Relative pivot threshold below which a factorization is reported singular.
inline constexpr double kPivotTolerance = 1e-12;

/// LU factorization with partial pivoting, PA = LU.
///
/// A pivot whose magnitude falls below kPivotTolerance times the largest
/// absolute entry of the input is treated as exact singularity. For the
/// interference systems built here that means the admitted set sits on the
/// feasibility boundary, which callers map to "infeasible".
class LuFactorization {
 public:
  static std::optional<LuFactorization> factor(const Matrix& a);

  std::size_t size() const { return lu_.rows(); }

  /// Solves A x = b.
  std::vector<double> solve(std::span<const double> b) const;
  /// Solves A^T y = b.
  std::vector<double> solve_transposed(std::span<const double> b) const;

 private:
  explicit LuFactorization(Matrix lu, std::vector<std::size_t> perm)
      : lu_(std::move(lu)), perm_(std::move(perm)) {}

  Matrix lu_;
  std::vector<std::size_t> perm_;  // row i of PA is row perm_[i] of A
};

/// Solves A x = b; nullopt when A is singular.
std::optional<std::vector<double>> solve(const Matrix& a, std::span<const double> b);

/// solve() followed by up to `max_rounds` of iterative refinement with
/// residuals accumulated in long double. Used where the unknowns span many
/// orders of magnitude.
std::optional<std::vector<double>> solve_refined(const Matrix& a, std::span<const double> b, int max_rounds = 3);

/// Row `row_index` of A^{-1}; nullopt when A is singular.
std::optional<std::vector<double>> invert_row(const Matrix& a, std::size_t row_index);

/// Infinity norm of A x - b.
double residual_inf_norm(const Matrix& a, std::span<const double> x, std::span<const double> b);

}  // namespace tierpac::numerics
