#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hqp/model.hpp"
#include "hqp/rng.hpp"

namespace hqp {

/// Membership bits of one random pool, one byte per individual (0 or 1).
using Pool = std::vector<std::uint8_t>;

struct InstanceParams {
  int n = 0;
  int d = 0;
  ProportionVector pi = ProportionVector::uniform(2);
  double alpha = 0.5;
  int m = 1;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when d != pi.dim(), n < 1, m < 1,
  /// alpha outside (0,1) or n*pi not integral.
  void validate() const;

  bool operator==(const InstanceParams&) const = default;
};

struct Instance {
  InstanceParams params;
  Assignment tau_star;
  std::vector<Pool> pools;
  std::vector<Histogram> histograms;

  int n() const noexcept { return tau_star.size(); }
  int d() const noexcept { return tau_star.num_types(); }
  int m() const noexcept { return static_cast<int>(pools.size()); }

  bool operator==(const Instance&) const = default;
};

/// n * pi_r as exact integers; throws std::invalid_argument when any
/// n * pi_r is farther than 1e-9 from an integer or the counts miss n.
std::vector<std::int64_t> planted_counts(int n, const ProportionVector& pi);

/// Uniformly random assignment with exactly n * pi_r individuals of type r.
Assignment sample_planted_assignment(int n, const ProportionVector& pi, Rng& rng);

/// n independent Bernoulli(alpha) membership bits.
Pool sample_pool(int n, double alpha, Rng& rng);

/// counts_r = #{i in pool : tau(i) = r}.
Histogram histogram_of(const Assignment& tau, const Pool& pool);

/// m = max(1, round(gamma * n / ln n)); throws for n < 2 or gamma <= 0.
int query_count_for_gamma(int n, double gamma);

/// Assembles an instance from explicit parts, computing the histograms.
/// params.m is overwritten with pools.size(); zero pools are accepted here
/// so that tests can build the unconstrained instance.
Instance make_instance(InstanceParams params, Assignment tau_star, std::vector<Pool> pools);

/// Draws tau_star and the m pools from stream `stream` of params.seed.
Instance generate_instance(const InstanceParams& params, std::uint64_t stream = 0);

/// Same, but with a caller-supplied planted assignment (pools still drawn
/// from the derived stream).
Instance generate_instance(const InstanceParams& params, const Assignment& tau_star, std::uint64_t stream);

/// JSON instance format: {"params": {...}, "tau_star": [...],
/// "pools": [[0,1,...], ...], "histograms": [[...], ...]}. Type labels in
/// tau_star are written 1-based. Reading re-validates every invariant.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(std::string_view text);
void write_instance(const Instance& inst, const std::filesystem::path& path);
Instance read_instance(const std::filesystem::path& path);

}  // namespace hqp
