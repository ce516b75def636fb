#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "hqp/model.hpp"

namespace hqp {

/// Directed off-diagonal pair (r, s), 0-based.
using VertexPair = std::pair<int, int>;

/// Decay-rate problem. `large` lists the pairs whose collision fraction is
/// optimized; every other off-diagonal pair carries the fixed flow nu_fixed.
struct RateProblem {
  WeightMatrix mu;
  std::vector<VertexPair> large;
  WeightMatrix nu_fixed;
  double alpha = 0.5;

  /// Throws std::invalid_argument unless: shapes agree, pairs in `large` are
  /// distinct and off-diagonal with mu > 0, and 0 <= nu_fixed <= mu on the
  /// remaining off-diagonal pairs, alpha in (0,1).
  void validate() const;

  /// Off-diagonal pairs not in `large`.
  std::vector<VertexPair> complement() const;
};

struct RateSolution {
  /// Infinite when no fractions can balance the fixed flow.
  double theta = std::numeric_limits<double>::infinity();
  /// Optimal fractions on `large`; zero elsewhere.
  WeightMatrix x_star;
  /// Dual potentials with lambda[d-1] = 0.
  std::vector<double> lambda;
  bool converged = false;
  /// The supremum is approached at infinity; some fractions tend to 0 or 1.
  bool boundary = false;
  bool unbounded = false;
  /// Largest vertex imbalance of (x* . mu on large, nu_fixed elsewhere).
  double kkt_residual = 0.0;
  /// Primal objective at x* minus dual objective at lambda.
  double dual_gap = 0.0;
  int iterations = 0;
};

struct RateOptions {
  int max_iterations = 200;
  /// Gradient infinity-norm tolerance, multiplied by max(1, total mass).
  double gradient_tolerance = 1e-10;
  /// Potentials to start from (size d, last entry ignored).
  std::optional<std::vector<double>> initial_lambda;
};

/// Primal objective sum_{large} mu_rs D(x_rs || alpha).
double rate_primal_objective(const RateProblem& p, const WeightMatrix& x);

/// Concave dual sum_{other} nu_rs (l_r - l_s) - sum_{large} mu_rs log(alpha e^{-(l_r - l_s)} + 1 - alpha).
double rate_dual_objective(const RateProblem& p, std::span<const double> lambda);

/// x_rs = alpha / (alpha + (1 - alpha) e^{l_r - l_s}) on `large`.
WeightMatrix optimal_fractions(const RateProblem& p, std::span<const double> lambda);

/// Maximizes the dual by damped Newton with Armijo backtracking.
RateSolution solve_rate(const RateProblem& p, const RateOptions& options = {});

/// Rate of a weight matrix: large = off-diagonal support, no fixed flow.
double theta_of_w(const WeightMatrix& w, double alpha);

struct ThetaBounds {
  /// Infimum of the rate over fixed flows in the box [0, mu] off `large`.
  double inf_theta = 0.0;
  /// Supremum over the same box.
  double sup_theta = 0.0;
};

/// Infimum from the dual of the box problem, whose kinks are smoothed and the
/// smoothing driven to 1e-13 per unit mass; supremum by enumerating box
/// vertices. ResourceError above 12 free coordinates.
ThetaBounds theta_bounds(const OverlapMatrix& mu, const std::vector<VertexPair>& large, double alpha);

/// 1/alpha^2 + 1/(1-alpha)^2.
double kappa(double alpha);

/// sum_{large} mu_rs (l_r - l_s)^2 <= kappa(alpha) * sum_{large} mu_rs.
bool check_lambda_bound(const RateSolution& sol, const RateProblem& p);

}  // namespace hqp
