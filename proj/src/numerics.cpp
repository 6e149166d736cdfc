#include "tierpac/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tierpac::numerics {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::max_abs() const {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

std::vector<double> Matrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw std::invalid_argument("Matrix::multiply: dimension mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

std::optional<LuFactorization> LuFactorization::factor(const Matrix& a) {
  if (!a.square() || a.rows() == 0) {
    throw std::invalid_argument("LuFactorization: matrix must be square and non-empty");
  }
  const std::size_t n = a.rows();
  const double scale = a.max_abs();
  if (!(scale > 0.0) || !std::isfinite(scale)) return std::nullopt;
  const double threshold = kPivotTolerance * scale;

  Matrix lu = a;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(lu(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(lu(r, k)) > best) {
        best = std::abs(lu(r, k));
        pivot = r;
      }
    }
    if (best <= threshold) return std::nullopt;
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(k, c), lu(pivot, c));
      std::swap(perm[k], perm[pivot]);
    }
    const double diag = lu(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double factor = lu(r, k) / diag;
      lu(r, k) = factor;
      if (factor == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) lu(r, c) -= factor * lu(k, c);
    }
  }
  return LuFactorization(std::move(lu), std::move(perm));
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw std::invalid_argument("LuFactorization::solve: dimension mismatch");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  // L y = Pb, unit diagonal
  for (std::size_t i = 0; i < n; ++i) {
    double acc = x[i];
    for (std::size_t k = 0; k < i; ++k) acc -= lu_(i, k) * x[k];
    x[i] = acc;
  }
  // U x = y
  for (std::size_t i = n; i-- > 0;) {
    double acc = x[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= lu_(i, k) * x[k];
    x[i] = acc / lu_(i, i);
  }
  return x;
}

std::vector<double> LuFactorization::solve_transposed(std::span<const double> b) const {
  // A^T = U^T L^T P, so solve U^T z = b, L^T w = z, y = P^T w.
  const std::size_t n = size();
  if (b.size() != n) throw std::invalid_argument("LuFactorization::solve_transposed: dimension mismatch");
  std::vector<double> z(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double acc = z[i];
    for (std::size_t k = 0; k < i; ++k) acc -= lu_(k, i) * z[k];
    z[i] = acc / lu_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = z[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= lu_(k, i) * z[k];
    z[i] = acc;
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[perm_[i]] = z[i];
  return y;
}

std::optional<std::vector<double>> solve(const Matrix& a, std::span<const double> b) {
  if (!a.square() || b.size() != a.rows()) throw std::invalid_argument("solve: dimension mismatch");
  auto lu = LuFactorization::factor(a);
  if (!lu) return std::nullopt;
  return lu->solve(b);
}

std::optional<std::vector<double>> solve_refined(const Matrix& a, std::span<const double> b, int max_rounds) {
  if (!a.square() || b.size() != a.rows()) throw std::invalid_argument("solve_refined: dimension mismatch");
  auto lu = LuFactorization::factor(a);
  if (!lu) return std::nullopt;
  auto x = lu->solve(b);
  const std::size_t n = a.rows();
  std::vector<double> r(n);
  for (int round = 0; round < max_rounds; ++round) {
    // Residual accumulated in extended precision; otherwise the correction
    // is mostly rounding noise.
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      long double acc = b[i];
      for (std::size_t j = 0; j < n; ++j) acc -= static_cast<long double>(a(i, j)) * x[j];
      r[i] = static_cast<double>(acc);
      worst = std::max(worst, std::abs(r[i]));
    }
    if (worst == 0.0) break;
    const auto dx = lu->solve(r);
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = x[i] + dx[i];
      moved = moved || next != x[i];
      x[i] = next;
    }
    if (!moved) break;
  }
  return x;
}

std::optional<std::vector<double>> invert_row(const Matrix& a, std::size_t row_index) {
  if (!a.square() || row_index >= a.rows()) throw std::invalid_argument("invert_row: bad row index");
  auto lu = LuFactorization::factor(a);
  if (!lu) return std::nullopt;
  std::vector<double> unit(a.rows(), 0.0);
  unit[row_index] = 1.0;
  return lu->solve_transposed(unit);
}

double residual_inf_norm(const Matrix& a, std::span<const double> x, std::span<const double> b) {
  const auto ax = a.multiply(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) worst = std::max(worst, std::abs(ax[i] - b[i]));
  return worst;
}

}  // namespace tierpac::numerics
