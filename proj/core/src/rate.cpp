#include "hqp/rate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "hqp/error.hpp"
#include "hqp/linalg.hpp"

namespace hqp {

namespace {

constexpr double kStepCap = 5.0;
constexpr double kUnboundedLambda = 500.0;
constexpr double kBoundaryFraction = 1e-8;

// -log(alpha e^{-delta} + 1 - alpha), evaluated without overflow.
double fraction_term(double alpha, double delta) {
  if (delta < 0.0) return delta - std::log(alpha + (1.0 - alpha) * std::exp(delta));
  return -std::log1p(alpha * std::expm1(-delta));
}

double fraction_at(double alpha, double delta) {
  if (delta > 0.0) {
    const double e = std::exp(-delta);
    return alpha * e / (alpha * e + (1.0 - alpha));
  }
  return alpha / (alpha + (1.0 - alpha) * std::exp(delta));
}

double total_large_mass(const RateProblem& p) {
  double mass = 0.0;
  for (auto [r, s] : p.large) mass += p.mu(r, s);
  return mass;
}

// Net outflow of every vertex for fractions x on `large` and nu_fixed elsewhere.
std::vector<double> imbalance(const RateProblem& p, const WeightMatrix& x) {
  std::vector<double> net(static_cast<std::size_t>(p.mu.dim()), 0.0);
  for (auto [r, s] : p.large) {
    net[r] += x(r, s) * p.mu(r, s);
    net[s] -= x(r, s) * p.mu(r, s);
  }
  for (auto [r, s] : p.complement()) {
    net[r] += p.nu_fixed(r, s);
    net[s] -= p.nu_fixed(r, s);
  }
  return net;
}

double inf_norm(std::span<const double> v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

}  // namespace

void RateProblem::validate() const {
  const int d = mu.dim();
  if (d < 2) throw std::invalid_argument("RateProblem: need d >= 2");
  if (nu_fixed.dim() != d) throw std::invalid_argument("RateProblem: nu_fixed has the wrong dimension");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("RateProblem: alpha must lie in (0,1)");
  std::set<VertexPair> seen;
  for (auto [r, s] : large) {
    if (r < 0 || s < 0 || r >= d || s >= d || r == s)
      throw std::invalid_argument("RateProblem: large pairs must be off-diagonal and in range");
    if (!seen.insert({r, s}).second) throw std::invalid_argument("RateProblem: duplicate large pair");
    if (!(mu(r, s) > 0.0)) throw std::invalid_argument("RateProblem: mu must be positive on large pairs");
  }
  for (auto [r, s] : complement())
    if (!(nu_fixed(r, s) >= 0.0 && nu_fixed(r, s) <= mu(r, s)))
      throw std::invalid_argument("RateProblem: nu_fixed must lie in [0, mu] off the large pairs");
}

std::vector<VertexPair> RateProblem::complement() const {
  std::set<VertexPair> in_large(large.begin(), large.end());
  std::vector<VertexPair> out;
  for (int r = 0; r < mu.dim(); ++r)
    for (int s = 0; s < mu.dim(); ++s)
      if (r != s && !in_large.contains({r, s})) out.emplace_back(r, s);
  return out;
}

double rate_primal_objective(const RateProblem& p, const WeightMatrix& x) {
  double acc = 0.0;
  for (auto [r, s] : p.large) acc += p.mu(r, s) * kl_bernoulli(std::clamp(x(r, s), 0.0, 1.0), p.alpha);
  return acc;
}

double rate_dual_objective(const RateProblem& p, std::span<const double> lambda) {
  double acc = 0.0;
  for (auto [r, s] : p.complement()) acc += p.nu_fixed(r, s) * (lambda[r] - lambda[s]);
  for (auto [r, s] : p.large) acc += p.mu(r, s) * fraction_term(p.alpha, lambda[r] - lambda[s]);
  return acc;
}

WeightMatrix optimal_fractions(const RateProblem& p, std::span<const double> lambda) {
  WeightMatrix x(p.mu.dim(), 0.0);
  for (auto [r, s] : p.large) x(r, s) = fraction_at(p.alpha, lambda[r] - lambda[s]);
  return x;
}

RateSolution solve_rate(const RateProblem& p, const RateOptions& options) {
  p.validate();
  const int d = p.mu.dim();
  const int k = d - 1;
  const double mass = std::max(1.0, total_large_mass(p));
  const double tol = options.gradient_tolerance * mass;

  RateSolution sol;
  sol.lambda.assign(static_cast<std::size_t>(d), 0.0);
  if (options.initial_lambda) {
    if (options.initial_lambda->size() != static_cast<std::size_t>(d))
      throw std::invalid_argument("solve_rate: initial_lambda has the wrong size");
    for (int r = 0; r < k; ++r) sol.lambda[r] = (*options.initial_lambda)[r] - (*options.initial_lambda)[k];
  }
  auto& lambda = sol.lambda;
  double value = rate_dual_objective(p, lambda);

  double prev_step = 0.0;
  int growing = 0;
  for (sol.iterations = 0; sol.iterations < options.max_iterations; ++sol.iterations) {
    const WeightMatrix x = optimal_fractions(p, lambda);
    const auto net = imbalance(p, x);
    std::vector<double> grad(net.begin(), net.begin() + k);
    if (inf_norm(grad) <= tol) {
      sol.converged = true;
      break;
    }
    if (inf_norm(lambda) > kUnboundedLambda) {
      sol.converged = true;
      sol.unbounded = true;
      break;
    }

    // Negative Hessian: sum mu x(1-x) (e_r - e_s)(e_r - e_s)^T, plus a ridge
    // that keeps directions the large pairs do not reach solvable.
    Matrix h(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    for (auto [r, s] : p.large) {
      const double c = p.mu(r, s) * x(r, s) * (1.0 - x(r, s));
      if (r < k) h(r, r) += c;
      if (s < k) h(s, s) += c;
      if (r < k && s < k) {
        h(r, s) -= c;
        h(s, r) -= c;
      }
    }
    for (int r = 0; r < k; ++r) h(r, r) += 1e-12 * mass;
    std::vector<double> step = solve_linear(h, grad);
    const double snorm = inf_norm(step);
    if (snorm > kStepCap)
      for (double& v : step) v *= kStepCap / snorm;

    double slope = 0.0;
    for (int r = 0; r < k; ++r) slope += grad[r] * step[r];
    double t = 1.0;
    double gain = 0.0;
    bool accepted = false;
    // Once the predicted gain is below the resolution of the objective the
    // Armijo test only sees rounding; the undamped Newton step is then safe.
    const bool at_resolution = slope <= 1e-13 * std::max(1.0, std::abs(value));
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      std::vector<double> trial = lambda;
      for (int r = 0; r < k; ++r) trial[r] += t * step[r];
      const double tv = rate_dual_objective(p, trial);
      if (at_resolution || tv >= value + 1e-4 * t * slope) {
        gain = tv - value;
        lambda = std::move(trial);
        value = tv;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent is possible at double precision: we are at the optimum up
      // to rounding, or on the flat tail of an unattained supremum.
      sol.converged = true;
      sol.boundary = true;
      break;
    }

    const double taken = t * std::min(snorm, kStepCap);
    growing = (taken > prev_step && gain < 1e-12) ? growing + 1 : 0;
    prev_step = taken;
    if (growing >= 10) {
      sol.converged = true;
      sol.boundary = true;
      break;
    }
  }

  sol.x_star = optimal_fractions(p, lambda);
  const auto net = imbalance(p, sol.x_star);
  sol.kkt_residual = inf_norm(net);
  if (sol.unbounded) {
    sol.theta = std::numeric_limits<double>::infinity();
    return sol;
  }
  sol.theta = value;
  sol.dual_gap = rate_primal_objective(p, sol.x_star) - value;
  for (auto [r, s] : p.large)
    if (sol.x_star(r, s) < kBoundaryFraction || sol.x_star(r, s) > 1.0 - kBoundaryFraction) sol.boundary = true;
  return sol;
}

double theta_of_w(const WeightMatrix& w, double alpha) {
  const int d = w.dim();
  RateProblem p{w, {}, WeightMatrix(d, 0.0), alpha};
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) {
      if (w(r, s) < 0.0) throw std::invalid_argument("theta_of_w: weights must be nonnegative");
      if (r != s && w(r, s) > 0.0) p.large.emplace_back(r, s);
    }
  return solve_rate(p).theta;
}

namespace {

struct BoxPoint {
  double theta;
  std::vector<double> lambda;
};

BoxPoint evaluate(RateProblem& p, const std::vector<VertexPair>& free, std::span<const double> nu,
                  const std::optional<std::vector<double>>& warm) {
  for (std::size_t i = 0; i < free.size(); ++i) p.nu_fixed(free[i].first, free[i].second) = nu[i];
  RateOptions opt;
  opt.initial_lambda = warm;
  RateSolution sol = solve_rate(p, opt);
  return {sol.theta, std::move(sol.lambda)};
}

// Infimum of the rate over nu in the box [0, mu] on `free`. Swapping the
// minimum over nu with the dual supremum turns each free cell into
// mu_rs min(0, l_r - l_s), a concave kink. It is smoothed to
// -tau mu log(1 + e^{-(l_r - l_s)/tau}), which undershoots by at most
// tau log 2 per unit mass, and tau is driven down with warm starts.
double box_infimum(const RateProblem& p, const std::vector<VertexPair>& free) {
  const int d = p.mu.dim();
  const int k = d - 1;
  double mass = total_large_mass(p);
  for (auto [r, s] : free) mass += p.mu(r, s);
  mass = std::max(1.0, mass);

  std::vector<double> lambda(static_cast<std::size_t>(d), 0.0);
  double value = 0.0;
  for (double tau = 1.0; tau >= 1e-13; tau *= 0.1) {
    auto objective = [&](std::span<const double> l) {
      double acc = 0.0;
      for (auto [r, s] : p.large) acc += p.mu(r, s) * fraction_term(p.alpha, l[r] - l[s]);
      for (auto [r, s] : free) {
        const double z = -(l[r] - l[s]) / tau;
        acc -= tau * p.mu(r, s) * (z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)));
      }
      return acc;
    };
    value = objective(lambda);
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<double> grad(static_cast<std::size_t>(k), 0.0);
      Matrix h(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
      auto add = [&](int r, int s, double g, double c) {
        if (r < k) {
          grad[r] += g;
          h(r, r) += c;
        }
        if (s < k) {
          grad[s] -= g;
          h(s, s) += c;
        }
        if (r < k && s < k) {
          h(r, s) -= c;
          h(s, r) -= c;
        }
      };
      for (auto [r, s] : p.large) {
        const double x = fraction_at(p.alpha, lambda[r] - lambda[s]);
        add(r, s, p.mu(r, s) * x, p.mu(r, s) * x * (1.0 - x));
      }
      for (auto [r, s] : free) {
        const double z = -(lambda[r] - lambda[s]) / tau;
        const double y = z > 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
        add(r, s, p.mu(r, s) * y, p.mu(r, s) * y * (1.0 - y) / tau);
      }
      if (inf_norm(grad) <= 1e-12 * mass) break;
      // The ridge must survive rounding next to curvatures of order mass / tau.
      double diag = mass;
      for (int r = 0; r < k; ++r) diag = std::max(diag, h(r, r));
      for (int r = 0; r < k; ++r) h(r, r) += 1e-12 * diag;
      std::vector<double> step = solve_linear(h, grad);
      const double snorm = inf_norm(step);
      if (snorm > kStepCap)
        for (double& v : step) v *= kStepCap / snorm;
      double slope = 0.0;
      for (int r = 0; r < k; ++r) slope += grad[r] * step[r];
      bool accepted = false;
      double t = 1.0;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        std::vector<double> trial = lambda;
        for (int r = 0; r < k; ++r) trial[r] += t * step[r];
        const double tv = objective(trial);
        if (tv >= value + 1e-4 * t * slope) {
          lambda = std::move(trial);
          value = tv;
          accepted = true;
          break;
        }
      }
      if (!accepted || inf_norm(lambda) > kUnboundedLambda) break;
    }
  }
  return std::max(0.0, value);
}

}  // namespace

ThetaBounds theta_bounds(const OverlapMatrix& mu, const std::vector<VertexPair>& large, double alpha) {
  const int d = mu.dim();
  RateProblem p{to_weights(mu), large, WeightMatrix(d, 0.0), alpha};
  p.validate();
  for (auto [r, s] : large)
    if (mu(r, s) < 1) throw std::invalid_argument("theta_bounds: mu must be >= 1 on large pairs");

  std::vector<VertexPair> free;
  std::vector<double> upper;
  for (auto [r, s] : p.complement())
    if (mu(r, s) > 0) {
      free.emplace_back(r, s);
      upper.push_back(static_cast<double>(mu(r, s)));
    }
  if (free.empty()) {
    const double t = solve_rate(p).theta;
    return {t, t};
  }
  if (free.size() > 12)
    throw ResourceError("theta_bounds: " + std::to_string(free.size()) + " free coordinates exceed the limit of 12");

  ThetaBounds out;

  // Supremum of a convex function over a box sits at a vertex.
  out.sup_theta = -std::numeric_limits<double>::infinity();
  std::vector<double> corner(free.size());
  for (std::uint32_t mask = 0; mask < (1u << free.size()); ++mask) {
    for (std::size_t i = 0; i < free.size(); ++i) corner[i] = (mask >> i & 1u) ? upper[i] : 0.0;
    out.sup_theta = std::max(out.sup_theta, evaluate(p, free, corner, std::nullopt).theta);
  }

  out.inf_theta = box_infimum(p, free);
  return out;
}

double kappa(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("kappa: alpha must lie in (0,1)");
  return 1.0 / (alpha * alpha) + 1.0 / ((1.0 - alpha) * (1.0 - alpha));
}

bool check_lambda_bound(const RateSolution& sol, const RateProblem& p) {
  double lhs = 0.0;
  double mass = 0.0;
  for (auto [r, s] : p.large) {
    const double diff = sol.lambda[r] - sol.lambda[s];
    lhs += p.mu(r, s) * diff * diff;
    mass += p.mu(r, s);
  }
  return lhs <= kappa(p.alpha) * mass;
}

}  // namespace hqp
