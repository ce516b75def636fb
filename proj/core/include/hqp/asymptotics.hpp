#pragma once

#include <cstdint>
#include <vector>

#include "hqp/model.hpp"
#include "hqp/rate.hpp"

namespace hqp {

enum class Regime { polynomial, exponential };

/// Direction w scaled along an n-grid; the regime follows from whether w is a
/// balanced flow.
struct ScalingExperiment {
  WeightMatrix w;
  std::vector<int> n_grid;
  double alpha = 0.5;

  Regime regime() const;
};

struct GridPoint {
  int n = 0;
  OverlapMatrix mu;
  double q = 0.0;
  double log_q = 0.0;
  /// Cells adjusted to restore flow balance after rounding.
  int repairs = 0;
};

/// n*w rounded half-to-even per entry. When w is a balanced flow the
/// rounding residue of each vertex is pushed to the largest vertex of its
/// support component along support cells, so the result is balanced too.
/// Throws std::domain_error if a repair would make a cell negative.
OverlapMatrix round_scaled(const WeightMatrix& w, int n, int* repairs = nullptr);

/// Exact q(round_scaled(w, n)) for every grid point, in grid order.
std::vector<GridPoint> evaluate_grid(const ScalingExperiment& exp, int threads = 1);

/// Connected components of the off-diagonal support of w (isolated vertices
/// count as components).
int support_components(const WeightMatrix& w);

struct PolynomialRate {
  double slope = 0.0;
  double target = 0.0;
  bool pass = false;
  std::vector<GridPoint> points;
};

/// OLS slope of ln q against ln n on the last half of the grid; passes when
/// within `tolerance` of -(d - ncc)/2. Throws std::invalid_argument unless w
/// is balanced.
PolynomialRate verify_polynomial_rate(const ScalingExperiment& exp, double tolerance = 0.05, int threads = 1);

struct ExponentialRate {
  /// Fitted limit of ln q / n.
  double rate = 0.0;
  double theta = 0.0;
  bool pass = false;
  std::vector<GridPoint> points;
};

/// Fits ln q = a + b ln n - t n on the last half of the grid (at least three
/// points) and compares -t with -theta_of_w(w) at `rel_tolerance`. Throws
/// std::invalid_argument if w is balanced.
ExponentialRate verify_exponential_rate(const ScalingExperiment& exp, double rel_tolerance = 0.05, int threads = 1);

struct BracketingRow {
  int scale = 0;
  OverlapMatrix mu;
  double q = 0.0;
  double forest = 0.0;
  double inf_theta = 0.0;
  double sup_theta = 0.0;
  /// q sqrt(P_G) e^{inf_theta}
  double upper_ratio = 0.0;
  /// q sqrt(P_G) e^{sup_theta}
  double lower_ratio = 0.0;
};

struct Bracketing {
  bool pass = false;
  /// max/min of each ratio over the grid.
  double upper_spread = 0.0;
  double lower_spread = 0.0;
  std::vector<BracketingRow> rows;
};

/// Scales the entries of mu on `large` by each factor, keeps the other cells
/// fixed, and checks that q sqrt(P_G) e^{theta} stays within a band of
/// width `band` (max/min) for both rate bounds. G is the graph of `large`
/// weighted by the scaled mu.
Bracketing verify_bracketing(const OverlapMatrix& mu, const std::vector<VertexPair>& large, double alpha,
                             const std::vector<int>& scales, double band = 10.0);

/// Ordinary least squares coefficients for columns x (each of length y).
std::vector<double> least_squares(const std::vector<std::vector<double>>& columns, const std::vector<double>& y);

}  // namespace hqp
