#pragma once

#include <cstdint>
#include <vector>

#include "hqp/model.hpp"
#include "hqp/rng.hpp"

namespace hqp {

/// Overlap matrix and pool inclusion probability; validated on construction
/// (nonnegative entries, d >= 2, alpha in (0,1)).
struct CollisionQuery {
  CollisionQuery(OverlapMatrix mu, double alpha);

  OverlapMatrix mu;
  double alpha;
};

struct DpOptions {
  /// Neumaier-compensated accumulation of incoming mass per state.
  bool compensated = false;
  /// ResourceError when the net-flow box has more states than this.
  std::int64_t max_states = 50'000'000;
};

/// Exact probability that a Bernoulli(alpha) sample of every overlap cell
/// yields a balanced flow: sum over integer 0 <= nu <= mu with nu in the flow
/// space of prod Binom(mu_rs, nu_rs) alpha^nu (1-alpha)^(mu-nu).
double collision_prob_dp(const CollisionQuery& q, const DpOptions& options = {});

struct DftOptions {
  /// ResourceError when L^(d-1) exceeds this.
  std::int64_t max_grid_points = 100'000'000;
  /// Largest |imaginary part| tolerated in the inverted sum.
  double imag_tolerance = 1e-9;
};

/// The same quantity by Fourier inversion on an L^(d-1) torus grid. The
/// per-cell laws are first exponentially tilted by the potentials that make
/// the mean net flow vanish; the tilt factor is pulled out exactly, which
/// keeps tiny probabilities accurate to relative precision.
/// Throws CrossCheckError when the inverted sum is not real to tolerance.
double collision_prob_dft(const CollisionQuery& q, const DftOptions& options = {});

/// Potentials lambda (last one fixed to 0) minimizing
/// sum_{r != s} mu_rs log(1 - alpha + alpha e^{lambda_r - lambda_s}),
/// clamped to [-clamp, clamp]. Exposed for the tests of the tilt.
std::vector<double> tilt_potentials(const CollisionQuery& q, double clamp = 36.0);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

/// Fraction of random pools on which tau and tau_star have equal histograms.
/// Each trial also checks that this event coincides with the sampled overlap
/// cells forming a balanced flow, throwing CrossCheckError otherwise.
McEstimate collision_prob_mc(const Assignment& tau, const Assignment& tau_star, double alpha, std::int64_t trials,
                             Rng& rng);

}  // namespace hqp
