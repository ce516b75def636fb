#include "hqp/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hqp/collision.hpp"
#include "hqp/error.hpp"

namespace hqp {

namespace {

std::vector<double> sorted_descending(const ProportionVector& pi) {
  std::vector<double> v(pi.values().begin(), pi.values().end());
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

double block_mass(const ProportionVector& pi, const std::vector<int>& block) {
  double acc = 0.0;
  for (int i : block) acc += pi[i];
  return acc;
}

double partition_entropy(const ProportionVector& pi, const std::vector<std::vector<int>>& blocks) {
  std::vector<double> masses;
  for (const auto& b : blocks) masses.push_back(block_mass(pi, b));
  return shannon_entropy(masses);
}

// Calls visit(mu) for every d x d nonnegative integer matrix with column s
// summing to cols[s]; columns are filled left to right, each by recursive
// compositions.
void for_each_overlap(const std::vector<std::int64_t>& cols, const std::function<void(const OverlapMatrix&)>& visit) {
  const int d = static_cast<int>(cols.size());
  OverlapMatrix mu(d, 0);
  std::function<void(int, int, std::int64_t)> fill = [&](int s, int r, std::int64_t left) {
    if (s == d) {
      visit(mu);
      return;
    }
    if (r == d - 1) {
      mu(r, s) = left;
      fill(s + 1, 0, s + 1 < d ? cols[s + 1] : 0);
      return;
    }
    for (std::int64_t v = 0; v <= left; ++v) {
      mu(r, s) = v;
      fill(s, r + 1, left - v);
    }
    mu(r, s) = 0;
  };
  fill(0, 0, cols[0]);
}

bool is_diagonal(const OverlapMatrix& mu) {
  for (int r = 0; r < mu.dim(); ++r)
    for (int s = 0; s < mu.dim(); ++s)
      if (r != s && mu(r, s) != 0) return false;
  return true;
}

std::int64_t off_diagonal_mass(const OverlapMatrix& mu) {
  std::int64_t acc = 0;
  for (int r = 0; r < mu.dim(); ++r)
    for (int s = 0; s < mu.dim(); ++s)
      if (r != s) acc += mu(r, s);
  return acc;
}

double log_multinomial(std::int64_t n, std::span<const std::int64_t> parts) {
  double acc = std::lgamma(static_cast<double>(n) + 1.0);
  for (auto p : parts) acc -= std::lgamma(static_cast<double>(p) + 1.0);
  return acc;
}

void guard_count(int n, const ProportionVector& pi, std::int64_t max_matrices) {
  const std::int64_t count = overlap_matrix_count(n, pi);
  if (count > max_matrices)
    throw ResourceError("overlap enumeration needs " + std::to_string(count) + " matrices, limit " +
                        std::to_string(max_matrices));
}

}  // namespace

std::vector<double> merged_distribution(const ProportionVector& pi, int k) {
  const int d = pi.dim();
  if (k < 1 || k > d - 1) throw std::invalid_argument("merged_distribution: need 1 <= k <= d-1");
  const auto sorted = sorted_descending(pi);
  std::vector<double> out;
  out.push_back(std::accumulate(sorted.begin(), sorted.begin() + (d - k + 1), 0.0));
  for (int l = 2; l <= k; ++l) out.push_back(sorted[d - k + l - 1]);
  return out;
}

ThresholdReport thresholds(const ProportionVector& pi) {
  const int d = pi.dim();
  const double h = shannon_entropy(pi);
  ThresholdReport out;
  out.gamma_low = h / (d - 1);
  out.gamma_up = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= d - 1; ++k) {
    out.merged.push_back(merged_distribution(pi, k));
    const double term = 2.0 * (h - shannon_entropy(out.merged.back())) / (d - k);
    out.upper_terms.push_back(term);
    if (term > out.gamma_up) {
      out.gamma_up = term;
      out.argmax_k = k;
    }
  }
  return out;
}

double free_energy(const ProportionVector& pi, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("free_energy: gamma must be >= 0");
  const int d = pi.dim();
  const double h = shannon_entropy(pi);
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= d - 1; ++k)
    best = std::max(best, h - shannon_entropy(merged_distribution(pi, k)) - gamma * (d - k) / 2.0);
  return best;
}

std::vector<std::vector<int>> partition_matrix(const std::vector<std::vector<int>>& blocks, int d) {
  std::vector<std::vector<int>> x(blocks.size(), std::vector<int>(static_cast<std::size_t>(d), 0));
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int i : blocks[b]) x[b].at(static_cast<std::size_t>(i)) = 1;
  return x;
}

PartitionResult min_partition_entropy(const ProportionVector& pi, int k,
                                      std::optional<std::vector<std::vector<int>>> initial) {
  const int d = pi.dim();
  if (k < 1 || k > d) throw std::invalid_argument("min_partition_entropy: need 1 <= k <= d");

  std::vector<std::vector<int>> groups;
  if (initial) {
    groups = std::move(*initial);
    std::vector<int> seen(static_cast<std::size_t>(d), 0);
    if (static_cast<int>(groups.size()) != k) throw std::invalid_argument("min_partition_entropy: need k blocks");
    for (const auto& g : groups) {
      if (g.empty()) throw std::invalid_argument("min_partition_entropy: empty block");
      for (int i : g) {
        if (i < 0 || i >= d || seen[i]++) throw std::invalid_argument("min_partition_entropy: blocks must partition 0..d-1");
      }
    }
    if (std::count(seen.begin(), seen.end(), 1) != d)
      throw std::invalid_argument("min_partition_entropy: blocks must cover 0..d-1");
  } else {
    groups.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < d; ++i) groups[std::min(i, k - 1)].push_back(i);
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [&](const auto& a, const auto& b) { return block_mass(pi, a) > block_mass(pi, b); });

  PartitionResult out;
  for (int p = k - 1; p >= 1; --p) {
    auto& group = groups[p];
    while (group.size() > 1) {
      auto largest = std::max_element(group.begin(), group.end(), [&](int a, int b) { return pi[a] < pi[b]; });
      groups[0].push_back(*largest);
      group.erase(largest);
      ++out.moves;
    }
    // Lightest element strictly lighter than the singleton, among groups 0..p-1.
    int best_group = -1;
    std::size_t best_pos = 0;
    double best_mass = pi[group[0]];
    for (int q = 0; q < p; ++q)
      for (std::size_t j = 0; j < groups[q].size(); ++j)
        if (pi[groups[q][j]] < best_mass) {
          best_mass = pi[groups[q][j]];
          best_group = q;
          best_pos = j;
        }
    if (best_group >= 0) {
      std::swap(group[0], groups[best_group][best_pos]);
      ++out.moves;
    }
  }
  out.value = partition_entropy(pi, groups);
  out.blocks = std::move(groups);

  const double expected = k == d ? shannon_entropy(pi) : shannon_entropy(merged_distribution(pi, k));
  if (std::abs(out.value - expected) > 1e-12)
    throw CrossCheckError("min_partition_entropy: greedy value " + std::to_string(out.value) +
                          " differs from the merged distribution " + std::to_string(expected));
  return out;
}

std::int64_t overlap_matrix_count(int n, const ProportionVector& pi) {
  const auto cols = planted_counts(n, pi);
  const int d = pi.dim();
  double count = 1.0;
  for (auto c : cols) {
    // Compositions of c into d parts: C(c + d - 1, d - 1).
    double binom = 1.0;
    for (int j = 1; j <= d - 1; ++j) binom = binom * static_cast<double>(c + j) / j;
    count *= std::round(binom);
  }
  if (count > 9e18) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(count);
}

double expected_excess_solutions(const InstanceParams& params, const ExcessOptions& options) {
  if (params.n < 1) throw std::invalid_argument("expected_excess_solutions: n must be >= 1");
  if (params.m < 0) throw std::invalid_argument("expected_excess_solutions: m must be >= 0");
  if (params.d != params.pi.dim()) throw std::invalid_argument("expected_excess_solutions: d does not match pi");
  if (!(params.alpha > 0.0 && params.alpha < 1.0))
    throw std::invalid_argument("expected_excess_solutions: alpha must lie in (0,1)");
  guard_count(params.n, params.pi, options.max_matrices);

  const auto cols = planted_counts(params.n, params.pi);
  const double log_norm = log_multinomial(params.n, cols);
  double sum = 0.0;
  double comp = 0.0;
  for_each_overlap(cols, [&](const OverlapMatrix& mu) {
    if (is_diagonal(mu)) return;
    if (options.consistent_only)
      for (int r = 0; r < mu.dim(); ++r)
        if (mu.row_sum(r) != cols[r]) return;
    const double q = params.m == 0 ? 1.0 : collision_prob_dp(CollisionQuery(mu, params.alpha));
    if (q <= 0.0) return;
    const double term = std::exp(log_multinomial(params.n, mu.values()) - log_norm + params.m * std::log(q));
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  });
  return sum + comp;
}

FiniteFreeEnergy finite_n_free_energy(int n, const ProportionVector& pi, double gamma, double alpha,
                                      std::int64_t max_matrices) {
  if (n < 2) throw std::invalid_argument("finite_n_free_energy: n must be >= 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("finite_n_free_energy: gamma must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("finite_n_free_energy: alpha must lie in (0,1)");
  guard_count(n, pi, max_matrices);

  const auto cols = planted_counts(n, pi);
  const double log_n = std::log(static_cast<double>(n));
  FiniteFreeEnergy best;
  best.value = -std::numeric_limits<double>::infinity();
  for_each_overlap(cols, [&](const OverlapMatrix& mu) {
    if (is_diagonal(mu)) return;
    const double q = collision_prob_dp(CollisionQuery(mu, alpha));
    const double v = log_multinomial(n, mu.values()) / n + gamma * std::log(q) / log_n;
    if (v > best.value) {
      best.value = v;
      best.argmax = mu;
      best.off_diagonal = off_diagonal_mass(mu);
    }
  });
  return best;
}

}  // namespace hqp
