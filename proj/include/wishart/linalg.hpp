#pragma once

#include <cstddef>
#include <vector>

namespace wishart::linalg {

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Determinant kept as mantissa * 2^exponent so that products of many
/// large or small pivots neither overflow nor underflow.
struct ScaledDeterminant {
  double mantissa = 0.0;
  long exponent = 0;

  double value() const;
};

/// Gaussian elimination with partial pivoting on a copy of `a` (square).
ScaledDeterminant determinant(Matrix<double> a);

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. Converged when the off-diagonal Frobenius norm drops below
/// 1e-12 * ||a||_F; throws JacobiNonConvergence after `max_sweeps` sweeps.
std::vector<double> jacobi_eigenvalues(Matrix<double> a, int max_sweeps = 100);

}  // namespace wishart::linalg
