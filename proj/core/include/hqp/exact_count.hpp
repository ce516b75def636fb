#pragma once

#include <cstdint>
#include <optional>

#include "hqp/instance.hpp"

namespace hqp {

struct CountResult {
  /// Number of satisfying assignments, or the limit when early_exit is set.
  std::int64_t count = 0;
  bool early_exit = false;
  /// The exact count exceeded 2^63 - 1; count holds that maximum.
  bool saturated = false;
  std::int64_t nodes_visited = 0;
};

/// Counts every tau in {1..d}^n reproducing all observed histograms of
/// `inst`. With a limit the search stops as soon as `limit` solutions are
/// known. Throws std::invalid_argument if limit < 1.
CountResult count_solutions(const Instance& inst, std::optional<std::int64_t> limit = std::nullopt);

/// True iff the instance has a satisfying assignment other than the planted one.
bool uniqueness_event(const Instance& inst);

struct ProbabilityEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t successes = 0;
  std::int64_t trials = 0;
};

struct EstimateOptions {
  /// Draw a fresh planted assignment for every trial; otherwise one planted
  /// assignment (from a reserved stream of the seed) is shared by all trials.
  bool resample_tau = true;
  int threads = 1;
};

/// Monte Carlo estimate of Pr(E) over instances drawn from `params`. Trial t
/// uses RNG stream t of params.seed, so the result does not depend on the
/// thread count. Standard error is the binomial sqrt(p(1-p)/trials).
ProbabilityEstimate estimate_prob_E(const InstanceParams& params, std::int64_t trials, EstimateOptions options = {});

}  // namespace hqp
