#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hqp/instance.hpp"
#include "hqp/model.hpp"

namespace hqp {

/// Sorted descending, the top d-k+1 masses merged into the first entry,
/// followed by the k-1 smallest masses. Throws std::invalid_argument unless
/// 1 <= k <= d-1.
std::vector<double> merged_distribution(const ProportionVector& pi, int k);

struct ThresholdReport {
  double gamma_low = 0.0;
  double gamma_up = 0.0;
  /// Maximizing k in 1..d-1; ties go to the smallest k.
  int argmax_k = 1;
  /// merged_distribution(pi, k) for k = 1..d-1.
  std::vector<std::vector<double>> merged;
  /// 2 (H(pi) - H(pi^(k))) / (d - k) for k = 1..d-1.
  std::vector<double> upper_terms;
};

ThresholdReport thresholds(const ProportionVector& pi);

/// max_k { H(pi) - H(pi^(k)) - gamma (d - k) / 2 }; throws for gamma < 0.
double free_energy(const ProportionVector& pi, double gamma);

struct PartitionResult {
  double value = 0.0;
  /// Element indices of each block, leftmost (heaviest) block first.
  std::vector<std::vector<int>> blocks;
  /// Group moves and swaps performed.
  int moves = 0;
};

/// k x d binary matrix with X[b][i] = 1 iff element i is in block b.
std::vector<std::vector<int>> partition_matrix(const std::vector<std::vector<int>>& blocks, int d);

/// Minimum entropy of the block masses over partitions of the d types into k
/// nonempty blocks, by the greedy transfer procedure: sort blocks by weight;
/// for the rightmost incomplete block move its largest element to the
/// leftmost block until it is a singleton, then swap it with the lightest
/// strictly lighter element to its left, if any, and mark it complete.
/// Starts from `initial` when given (k nonempty blocks covering 0..d-1),
/// otherwise from contiguous index blocks. Throws CrossCheckError if the
/// result differs from H(merged_distribution(pi, k)) by more than 1e-12.
PartitionResult min_partition_entropy(const ProportionVector& pi, int k,
                                      std::optional<std::vector<std::vector<int>>> initial = std::nullopt);

struct ExcessOptions {
  /// Keep only overlaps whose row sums also equal n*pi, i.e. candidates that
  /// are themselves pi-consistent.
  bool consistent_only = false;
  /// ResourceError when more overlap matrices would be enumerated.
  std::int64_t max_matrices = 10'000'000;
};

/// Number of overlap matrices with column sums n*pi.
std::int64_t overlap_matrix_count(int n, const ProportionVector& pi);

/// Exact expected number of non-planted solutions for params (n, pi, alpha, m).
double expected_excess_solutions(const InstanceParams& params, const ExcessOptions& options = {});

struct FiniteFreeEnergy {
  double value = 0.0;
  OverlapMatrix argmax;
  /// Off-diagonal mass of the maximizer.
  std::int64_t off_diagonal = 0;
};

/// max over non-diagonal overlaps of (1/n) ln C(n; mu) + gamma ln q(mu) / ln n,
/// i.e. the exponent of the largest term of E[Z-1] at real-valued
/// m = gamma n / ln n. Throws ResourceError past max_matrices.
FiniteFreeEnergy finite_n_free_energy(int n, const ProportionVector& pi, double gamma, double alpha,
                                      std::int64_t max_matrices = 10'000'000);

}  // namespace hqp
