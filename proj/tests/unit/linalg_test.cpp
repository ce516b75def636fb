#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hqp/linalg.hpp"

namespace hqp {
namespace {

TEST(Determinant, SmallCases) {
  Matrix a(2, 2);
  a(0, 0) = 3;
  a(0, 1) = 1;
  a(1, 0) = 4;
  a(1, 1) = 2;
  EXPECT_NEAR(determinant(a), 2.0, 1e-14);
  EXPECT_NEAR(determinant(Matrix::identity(5)), 1.0, 1e-15);
  Matrix singular(2, 2, 1.0);
  EXPECT_EQ(determinant(singular), 0.0);
  EXPECT_THROW(determinant(Matrix(2, 3)), std::invalid_argument);
}

TEST(SolveLinear, SolvesAndRejectsSingular) {
  Matrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 3;
  const auto x = solve_linear(a, {3, 5});
  EXPECT_NEAR(x[0], 0.8, 1e-14);
  EXPECT_NEAR(x[1], 1.4, 1e-14);
  EXPECT_THROW(solve_linear(Matrix(2, 2, 1.0), {1, 1}), std::domain_error);
  EXPECT_THROW(solve_linear(a, {1}), std::invalid_argument);
}

TEST(ExactDeterminant, BareissAndRational) {
  const auto m = to_exact({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}});
  EXPECT_EQ(bareiss_determinant(m), 4);
  EXPECT_EQ(bareiss_determinant(to_exact({{0, 1}, {1, 0}})), -1);
  EXPECT_EQ(bareiss_determinant(to_exact({{1, 2}, {2, 4}})), 0);
  ExactMatrix<Rational> r{{Rational(1, 2), Rational(1, 3)}, {Rational(1, 4), Rational(1, 5)}};
  EXPECT_EQ(rational_determinant(r), Rational(1, 10) - Rational(1, 12));
  EXPECT_THROW(bareiss_determinant(ExactMatrix<BigInt>{{1, 2}}), std::invalid_argument);
}

TEST(Eigen, SymmetricEigenvalues) {
  Matrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 2;
  const auto ev = symmetric_eigenvalues(a);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0], 1.0, 1e-14);
  EXPECT_NEAR(ev[1], 3.0, 1e-14);
}

TEST(GaussHermite, IntegratesPolynomialsExactly) {
  const auto rule = gauss_hermite(10);
  double m0 = 0, m2 = 0, m4 = 0, m18 = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i], w = rule.weights[i];
    m0 += w;
    m2 += w * x * x;
    m4 += w * std::pow(x, 4);
    m18 += w * std::pow(x, 18);
  }
  const double sp = std::sqrt(std::numbers::pi);
  EXPECT_NEAR(m0, sp, 1e-13);
  EXPECT_NEAR(m2, sp / 2, 1e-13);
  EXPECT_NEAR(m4, 3 * sp / 4, 1e-13);
  // (17)!! / 2^9 * sqrt(pi)
  EXPECT_NEAR(m18 / (34459425.0 / 512.0 * sp), 1.0, 1e-11);
  EXPECT_THROW(gauss_hermite(0), std::invalid_argument);
}

}  // namespace
}  // namespace hqp
