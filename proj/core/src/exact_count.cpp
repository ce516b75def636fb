#include "hqp/exact_count.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hqp/parallel.hpp"

namespace hqp {

namespace {

constexpr std::int64_t kMaxCount = std::numeric_limits<std::int64_t>::max();
constexpr std::uint64_t kSharedTauStream = ~std::uint64_t{0};

std::int64_t saturating_mul(std::int64_t a, std::int64_t b, bool& saturated) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) {
    saturated = true;
    return kMaxCount;
  }
  return out;
}

std::int64_t saturating_add(std::int64_t a, std::int64_t b, bool& saturated) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) {
    saturated = true;
    return kMaxCount;
  }
  return out;
}

class Search {
 public:
  Search(const Instance& inst, std::optional<std::int64_t> limit) : d_(inst.d()), limit_(limit) {
    const int n = inst.n();
    const int m = inst.m();
    residual_.resize(static_cast<std::size_t>(m));
    remaining_.assign(static_cast<std::size_t>(m), 0);
    for (int a = 0; a < m; ++a) residual_[a] = inst.histograms[a];

    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    memberships_.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < n; ++i)
        if (inst.pools[a][i]) {
          memberships_[i].push_back(a);
          ++degree[i];
          ++remaining_[a];
        }

    int free_count = 0;
    for (int i = 0; i < n; ++i) {
      if (degree[i] == 0)
        ++free_count;
      else
        order_.push_back(i);
    }
    std::stable_sort(order_.begin(), order_.end(), [&](int x, int y) { return degree[x] > degree[y]; });

    // Individuals outside every pool are unconstrained; each leaf stands for
    // d^free completions.
    leaf_weight_ = 1;
    for (int k = 0; k < free_count; ++k) leaf_weight_ = saturating_mul(leaf_weight_, d_, result_.saturated);
  }

  CountResult run() {
    if (consistent_root()) descend(0);
    return result_;
  }

 private:
  bool consistent_root() const {
    for (std::size_t a = 0; a < residual_.size(); ++a) {
      std::int64_t sum = 0;
      for (auto c : residual_[a]) {
        if (c < 0) return false;
        sum += c;
      }
      if (sum != remaining_[a]) return false;
    }
    return true;
  }

  bool done() const { return result_.early_exit; }

  void record_leaf() {
    result_.count = saturating_add(result_.count, leaf_weight_, result_.saturated);
    if (limit_ && result_.count >= *limit_) {
      result_.count = *limit_;
      result_.early_exit = true;
    }
  }

  void descend(std::size_t depth) {
    ++result_.nodes_visited;
    if (depth == order_.size()) {
      record_leaf();
      return;
    }
    const int i = order_[depth];
    const auto& pools = memberships_[i];
    for (int t = 0; t < d_ && !done(); ++t) {
      bool ok = true;
      for (int a : pools) {
        --residual_[a][t];
        --remaining_[a];
      }
      for (int a : pools) {
        const auto& res = residual_[a];
        if (res[t] < 0) {
          ok = false;
          break;
        }
        for (auto c : res)
          if (c > remaining_[a]) {
            ok = false;
            break;
          }
        if (!ok) break;
      }
      if (ok) descend(depth + 1);
      for (int a : pools) {
        ++residual_[a][t];
        ++remaining_[a];
      }
    }
  }

  int d_;
  std::optional<std::int64_t> limit_;
  std::vector<Histogram> residual_;
  std::vector<std::int64_t> remaining_;
  std::vector<std::vector<int>> memberships_;
  std::vector<int> order_;
  std::int64_t leaf_weight_ = 1;
  CountResult result_;
};

}  // namespace

CountResult count_solutions(const Instance& inst, std::optional<std::int64_t> limit) {
  if (limit && *limit < 1) throw std::invalid_argument("count_solutions: limit must be >= 1");
  return Search(inst, limit).run();
}

bool uniqueness_event(const Instance& inst) { return count_solutions(inst, 2).count >= 2; }

ProbabilityEstimate estimate_prob_E(const InstanceParams& params, std::int64_t trials, EstimateOptions options) {
  if (trials < 1) throw std::invalid_argument("estimate_prob_E: trials must be >= 1");
  params.validate();
  std::optional<Assignment> shared_tau;
  if (!options.resample_tau) {
    Rng rng = make_stream(params.seed, kSharedTauStream);
    shared_tau = sample_planted_assignment(params.n, params.pi, rng);
  }
  const auto hits = parallel_map<char>(static_cast<std::size_t>(trials), options.threads, [&](std::size_t t) {
    const Instance inst = shared_tau ? generate_instance(params, *shared_tau, t) : generate_instance(params, t);
    return static_cast<char>(uniqueness_event(inst));
  });
  ProbabilityEstimate out;
  out.trials = trials;
  out.successes = std::accumulate(hits.begin(), hits.end(), std::int64_t{0});
  out.estimate = static_cast<double>(out.successes) / static_cast<double>(trials);
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
  return out;
}

}  // namespace hqp
