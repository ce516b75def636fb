#include "hqp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "hqp/collision.hpp"
#include "hqp/flow_algebra.hpp"
#include "hqp/linalg.hpp"
#include "hqp/parallel.hpp"

namespace hqp {

namespace {

bool in_support(const WeightMatrix& w, int r, int s) { return r != s && w(r, s) > 0.0; }

// Last half of the grid (the asymptotic window), at least `minimum` points.
std::vector<GridPoint> tail(const std::vector<GridPoint>& points, std::size_t minimum) {
  const std::size_t keep = std::max(minimum, points.size() - points.size() / 2);
  if (points.size() < keep) throw std::invalid_argument("grid too short for the fit");
  return {points.end() - static_cast<std::ptrdiff_t>(keep), points.end()};
}

}  // namespace

Regime ScalingExperiment::regime() const { return in_flow_space(w, kFlowTolerance) ? Regime::polynomial : Regime::exponential; }

int support_components(const WeightMatrix& w) {
  FlowGraph g{w.dim(), {}, false};
  for (int r = 0; r < w.dim(); ++r)
    for (int s = 0; s < w.dim(); ++s)
      if (in_support(w, r, s)) g.edges.emplace_back(r, s);
  return g.component_count();
}

OverlapMatrix round_scaled(const WeightMatrix& w, int n, int* repairs) {
  const int d = w.dim();
  OverlapMatrix mu(d, 0);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) {
      if (w(r, s) < 0.0) throw std::invalid_argument("round_scaled: weights must be nonnegative");
      mu(r, s) = static_cast<std::int64_t>(std::nearbyint(n * w(r, s)));  // default mode: half to even
    }
  int fixes = 0;
  if (in_flow_space(w, kFlowTolerance)) {
    // Undirected adjacency of the off-diagonal support.
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(d));
    for (int r = 0; r < d; ++r)
      for (int s = r + 1; s < d; ++s)
        if (in_support(w, r, s) || in_support(w, s, r)) {
          adj[r].push_back(s);
          adj[s].push_back(r);
        }
    for (int r = 0; r < d; ++r) {
      const std::int64_t excess = mu.row_sum(r) - mu.col_sum(r);
      if (excess == 0) continue;
      // Search for the largest vertex of r's component, recording parents.
      std::vector<int> parent(static_cast<std::size_t>(d), -1);
      std::vector<char> seen(static_cast<std::size_t>(d), 0);
      std::queue<int> frontier;
      frontier.push(r);
      seen[r] = 1;
      int root = r;
      while (!frontier.empty()) {
        const int a = frontier.front();
        frontier.pop();
        root = std::max(root, a);
        for (int b : adj[a])
          if (!seen[b]) {
            seen[b] = 1;
            parent[b] = a;
            frontier.push(b);
          }
      }
      if (root == r) continue;  // the component's residue collects here
      // Push the excess from r to root: each step a -> b lowers a's
      // imbalance by `excess` and raises b's by the same amount.
      std::vector<int> path;
      for (int v = root; v != -1; v = parent[v]) path.push_back(v);
      std::reverse(path.begin(), path.end());
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const int a = path[i];
        const int b = path[i + 1];
        if (in_support(w, a, b))
          mu(a, b) -= excess;
        else
          mu(b, a) += excess;
        ++fixes;
        if (mu(a, b) < 0 || mu(b, a) < 0) throw std::domain_error("round_scaled: repair made a cell negative");
      }
    }
  }
  if (repairs) *repairs = fixes;
  return mu;
}

std::vector<GridPoint> evaluate_grid(const ScalingExperiment& exp, int threads) {
  std::vector<int> grid = exp.n_grid;
  std::sort(grid.begin(), grid.end());
  return parallel_map<GridPoint>(grid.size(), threads, [&](std::size_t i) {
    GridPoint p;
    p.n = grid[i];
    p.mu = round_scaled(exp.w, p.n, &p.repairs);
    p.q = collision_prob_dp(CollisionQuery(p.mu, exp.alpha));
    p.log_q = std::log(p.q);
    return p;
  });
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& columns, const std::vector<double>& y) {
  const std::size_t k = columns.size();
  Matrix normal(k, k);
  std::vector<double> rhs(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (columns[i].size() != y.size()) throw std::invalid_argument("least_squares: column length mismatch");
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t t = 0; t < y.size(); ++t) normal(i, j) += columns[i][t] * columns[j][t];
    for (std::size_t t = 0; t < y.size(); ++t) rhs[i] += columns[i][t] * y[t];
  }
  return solve_linear(normal, rhs);
}

PolynomialRate verify_polynomial_rate(const ScalingExperiment& exp, double tolerance, int threads) {
  if (exp.regime() != Regime::polynomial) throw std::invalid_argument("verify_polynomial_rate: w is not a balanced flow");
  PolynomialRate out;
  out.points = evaluate_grid(exp, threads);
  const auto window = tail(out.points, 2);
  std::vector<double> ones, log_n, y;
  for (const auto& p : window) {
    ones.push_back(1.0);
    log_n.push_back(std::log(static_cast<double>(p.n)));
    y.push_back(p.log_q);
  }
  out.slope = least_squares({ones, log_n}, y)[1];
  out.target = -(exp.w.dim() - support_components(exp.w)) / 2.0;
  out.pass = std::abs(out.slope - out.target) <= tolerance;
  return out;
}

ExponentialRate verify_exponential_rate(const ScalingExperiment& exp, double rel_tolerance, int threads) {
  if (exp.regime() != Regime::exponential) throw std::invalid_argument("verify_exponential_rate: w is a balanced flow");
  ExponentialRate out;
  out.points = evaluate_grid(exp, threads);
  const auto window = tail(out.points, 3);
  std::vector<double> ones, log_n, n, y;
  for (const auto& p : window) {
    ones.push_back(1.0);
    log_n.push_back(std::log(static_cast<double>(p.n)));
    n.push_back(static_cast<double>(p.n));
    y.push_back(p.log_q);
  }
  out.rate = least_squares({ones, log_n, n}, y)[2];
  out.theta = theta_of_w(exp.w, exp.alpha);
  out.pass = std::abs(-out.rate - out.theta) <= rel_tolerance * out.theta;
  return out;
}

Bracketing verify_bracketing(const OverlapMatrix& mu, const std::vector<VertexPair>& large, double alpha,
                             const std::vector<int>& scales, double band) {
  if (scales.empty()) throw std::invalid_argument("verify_bracketing: empty scale grid");
  const int d = mu.dim();
  FlowGraph g{d, large, false};
  g.validate();
  Bracketing out;
  for (int c : scales) {
    if (c < 1) throw std::invalid_argument("verify_bracketing: scales must be >= 1");
    BracketingRow row;
    row.scale = c;
    row.mu = mu;
    for (auto [r, s] : large) row.mu(r, s) *= c;
    row.q = collision_prob_dp(CollisionQuery(row.mu, alpha));
    row.forest = forest_polynomial(g, to_weights(row.mu)).value;
    const auto bounds = theta_bounds(row.mu, large, alpha);
    row.inf_theta = bounds.inf_theta;
    row.sup_theta = bounds.sup_theta;
    const double base = row.q * std::sqrt(row.forest);
    row.upper_ratio = base * std::exp(row.inf_theta);
    row.lower_ratio = base * std::exp(row.sup_theta);
    out.rows.push_back(std::move(row));
  }
  auto spread = [&](auto member) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : out.rows) {
      lo = std::min(lo, r.*member);
      hi = std::max(hi, r.*member);
    }
    return hi / lo;
  };
  out.upper_spread = spread(&BracketingRow::upper_ratio);
  out.lower_spread = spread(&BracketingRow::lower_ratio);
  out.pass = out.upper_spread <= band && out.lower_spread <= band;
  return out;
}

}  // namespace hqp
