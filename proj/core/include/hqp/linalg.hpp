#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace hqp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Matrix transposed() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// LU with partial pivoting. Throws std::invalid_argument for non-square input.
double determinant(Matrix a);

/// Solves a x = b by partial-pivot elimination; throws std::domain_error when
/// a pivot falls below 1e-300 (numerically singular).
std::vector<double> solve_linear(Matrix a, std::vector<double> b);

template <class T>
using ExactMatrix = std::vector<std::vector<T>>;

/// Fraction-free Bareiss elimination; exact for integer matrices.
BigInt bareiss_determinant(ExactMatrix<BigInt> a);

/// Gaussian elimination over the rationals.
Rational rational_determinant(ExactMatrix<Rational> a);

ExactMatrix<BigInt> to_exact(const std::vector<std::vector<int>>& a);

/// Eigenvalues of a symmetric matrix in ascending order.
std::vector<double> symmetric_eigenvalues(const Matrix& a);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// k-point Gauss-Hermite rule for the weight e^{-x^2} (Golub-Welsch).
QuadratureRule gauss_hermite(int k);

}  // namespace hqp
