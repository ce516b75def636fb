#include "hqp/collision.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "hqp/error.hpp"
#include "hqp/instance.hpp"
#include "hqp/linalg.hpp"

namespace hqp {

CollisionQuery::CollisionQuery(OverlapMatrix mu_in, double alpha_in) : mu(std::move(mu_in)), alpha(alpha_in) {
  if (mu.dim() < 2) throw std::invalid_argument("CollisionQuery: need d >= 2");
  for (auto v : mu.values())
    if (v < 0) throw std::invalid_argument("CollisionQuery: overlap entries must be nonnegative");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("CollisionQuery: alpha must lie in (0,1)");
}

namespace {

struct Cell {
  int r;
  int s;
  std::int64_t count;
};

std::vector<Cell> off_diagonal_cells(const OverlapMatrix& mu) {
  std::vector<Cell> cells;
  for (int r = 0; r < mu.dim(); ++r)
    for (int s = 0; s < mu.dim(); ++s)
      if (r != s && mu(r, s) > 0) cells.push_back({r, s, mu(r, s)});
  return cells;
}

// Off-diagonal mass leaving / entering each vertex.
std::vector<std::int64_t> out_flow(const OverlapMatrix& mu) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(mu.dim()), 0);
  for (int r = 0; r < mu.dim(); ++r) out[r] = mu.row_sum(r) - mu(r, r);
  return out;
}

std::vector<std::int64_t> in_flow(const OverlapMatrix& mu) {
  std::vector<std::int64_t> in(static_cast<std::size_t>(mu.dim()), 0);
  for (int s = 0; s < mu.dim(); ++s) in[s] = mu.col_sum(s) - mu(s, s);
  return in;
}

std::vector<double> binomial_pmf(std::int64_t n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n + 1));
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::int64_t k = 0; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double log_c = lgn - std::lgamma(kk + 1.0) - std::lgamma(static_cast<double>(n - k) + 1.0);
    pmf[k] = std::exp(log_c + kk * lp + static_cast<double>(n - k) * lq);
  }
  return pmf;
}

struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v, bool compensated) {
    if (!compensated) {
      sum += v;
      return;
    }
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

double collision_prob_dp(const CollisionQuery& q, const DpOptions& options) {
  const int d = q.mu.dim();
  const auto cells = off_diagonal_cells(q.mu);
  if (cells.empty()) return 1.0;

  // Net flow of vertex r (r < d-1) lies in [-in_r, out_r]; vertex d-1 is implied.
  const auto out = out_flow(q.mu);
  const auto in = in_flow(q.mu);
  std::vector<std::int64_t> stride(static_cast<std::size_t>(d), 0);
  std::int64_t total = 1;
  std::int64_t origin = 0;
  for (int r = 0; r + 1 < d; ++r) {
    stride[r] = total;
    const std::int64_t size = out[r] + in[r] + 1;
    if (total > options.max_states / size)
      throw ResourceError("collision_prob_dp: net-flow state space exceeds " + std::to_string(options.max_states) +
                          " states");
    total *= size;
    origin += in[r] * stride[r];
  }

  const bool comp = options.compensated;
  bool dense = false;
  std::unordered_map<std::int64_t, double> sparse{{origin, 1.0}};
  std::vector<double> dense_vals;

  for (const auto& cell : cells) {
    const auto pmf = binomial_pmf(cell.count, q.alpha);
    const std::int64_t delta = stride[cell.r] * (cell.r + 1 < d) - stride[cell.s] * (cell.s + 1 < d);
    auto spread = [&](auto&& emit, std::int64_t idx, double mass) {
      for (std::int64_t v = 0; v <= cell.count; ++v)
        if (pmf[v] != 0.0) emit(idx + v * delta, mass * pmf[v]);
    };
    if (dense) {
      std::vector<Accumulator> next(static_cast<std::size_t>(total));
      for (std::int64_t idx = 0; idx < total; ++idx)
        if (dense_vals[idx] != 0.0)
          spread([&](std::int64_t j, double v) { next[j].add(v, comp); }, idx, dense_vals[idx]);
      for (std::int64_t idx = 0; idx < total; ++idx) dense_vals[idx] = next[idx].value();
    } else {
      std::unordered_map<std::int64_t, Accumulator> next;
      next.reserve(sparse.size() * static_cast<std::size_t>(cell.count + 1));
      for (const auto& [idx, mass] : sparse)
        spread([&](std::int64_t j, double v) { next[j].add(v, comp); }, idx, mass);
      if (static_cast<double>(next.size()) > 0.25 * static_cast<double>(total)) {
        dense = true;
        dense_vals.assign(static_cast<std::size_t>(total), 0.0);
        for (const auto& [idx, acc] : next) dense_vals[idx] = acc.value();
        sparse.clear();
      } else {
        sparse.clear();
        for (const auto& [idx, acc] : next) sparse.emplace(idx, acc.value());
      }
    }
  }
  if (dense) return dense_vals[origin];
  const auto it = sparse.find(origin);
  return it == sparse.end() ? 0.0 : it->second;
}

namespace {

double log_mgf_term(double alpha, double delta) {
  // log(1 - alpha + alpha e^delta), stable for large |delta|.
  if (delta > 0.0) return delta + std::log(alpha + (1.0 - alpha) * std::exp(-delta));
  return std::log1p(alpha * std::expm1(delta));
}

double tilted_alpha(double alpha, double delta) {
  // alpha e^delta / (1 - alpha + alpha e^delta)
  return 1.0 / (1.0 + (1.0 - alpha) / alpha * std::exp(-delta));
}

double log_mgf(const std::vector<Cell>& cells, double alpha, const std::vector<double>& lambda) {
  double acc = 0.0;
  for (const auto& c : cells) acc += static_cast<double>(c.count) * log_mgf_term(alpha, lambda[c.r] - lambda[c.s]);
  return acc;
}

}  // namespace

std::vector<double> tilt_potentials(const CollisionQuery& q, double clamp) {
  const int d = q.mu.dim();
  const int k = d - 1;
  const auto cells = off_diagonal_cells(q.mu);
  std::vector<double> lambda(static_cast<std::size_t>(d), 0.0);
  if (cells.empty()) return lambda;
  double mass = 0.0;
  for (const auto& c : cells) mass += static_cast<double>(c.count);
  const double tol = 1e-12 * std::max(1.0, mass);

  double value = log_mgf(cells, q.alpha, lambda);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<double> grad(static_cast<std::size_t>(k), 0.0);
    Matrix hess(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    for (const auto& c : cells) {
      const double p = tilted_alpha(q.alpha, lambda[c.r] - lambda[c.s]);
      const double w = static_cast<double>(c.count);
      const double h = w * p * (1.0 - p);
      if (c.r < k) grad[c.r] += w * p;
      if (c.s < k) grad[c.s] -= w * p;
      if (c.r < k) hess(c.r, c.r) += h;
      if (c.s < k) hess(c.s, c.s) += h;
      if (c.r < k && c.s < k) {
        hess(c.r, c.s) -= h;
        hess(c.s, c.r) -= h;
      }
    }
    // Coordinates pinned at the clamp with the gradient pushing outward are
    // inactive; drop them from the convergence test.
    double gnorm = 0.0;
    for (int r = 0; r < k; ++r) {
      const bool pinned = (lambda[r] >= clamp && grad[r] < 0.0) || (lambda[r] <= -clamp && grad[r] > 0.0);
      if (!pinned) gnorm = std::max(gnorm, std::abs(grad[r]));
    }
    if (gnorm <= tol) break;
    for (int r = 0; r < k; ++r) hess(r, r) += 1e-12 * std::max(1.0, mass);
    std::vector<double> neg(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) neg[i] = -grad[i];
    std::vector<double> step = solve_linear(hess, neg);
    double snorm = 0.0;
    for (double s : step) snorm = std::max(snorm, std::abs(s));
    if (snorm > 5.0)
      for (double& s : step) s *= 5.0 / snorm;

    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      std::vector<double> trial = lambda;
      for (int r = 0; r < k; ++r) trial[r] = std::clamp(lambda[r] + t * step[r], -clamp, clamp);
      const double tv = log_mgf(cells, q.alpha, trial);
      double decrease = 0.0;
      for (int r = 0; r < k; ++r) decrease += grad[r] * (trial[r] - lambda[r]);
      if (tv <= value + 1e-4 * decrease) {
        moved = tv < value || trial != lambda;
        lambda = std::move(trial);
        value = tv;
        break;
      }
    }
    if (!moved) break;
  }
  return lambda;
}

double collision_prob_dft(const CollisionQuery& q, const DftOptions& options) {
  const int d = q.mu.dim();
  const int k = d - 1;
  const auto cells = off_diagonal_cells(q.mu);
  if (cells.empty()) return 1.0;

  const auto out = out_flow(q.mu);
  const auto in = in_flow(q.mu);
  std::int64_t span = 0;
  for (int r = 0; r < d; ++r) span = std::max(span, out[r] + in[r]);
  std::int64_t L = 2;
  while (L <= 2 * span) L *= 2;

  std::int64_t points = 1;
  for (int r = 0; r < k; ++r) {
    if (points > options.max_grid_points / L)
      throw ResourceError("collision_prob_dft: grid exceeds " + std::to_string(options.max_grid_points) + " points");
    points *= L;
  }

  const auto lambda = tilt_potentials(q);
  const double log_m = log_mgf(cells, q.alpha, lambda);

  // Per-cell characteristic function of the tilted Binomial on the grid.
  std::vector<std::vector<std::complex<double>>> table;
  table.reserve(cells.size());
  for (const auto& c : cells) {
    const double a = tilted_alpha(q.alpha, lambda[c.r] - lambda[c.s]);
    std::vector<std::complex<double>> row(static_cast<std::size_t>(L));
    for (std::int64_t j = 0; j < L; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(L);
      const std::complex<double> z = (1.0 - a) + a * std::polar(1.0, angle);
      const double n = static_cast<double>(c.count);
      row[j] = std::polar(std::pow(std::abs(z), n), n * std::arg(z));
    }
    table.push_back(std::move(row));
  }

  std::vector<std::int64_t> theta(static_cast<std::size_t>(d), 0);
  Accumulator re, im;
  for (std::int64_t p = 0; p < points; ++p) {
    std::int64_t rest = p;
    for (int r = 0; r < k; ++r) {
      theta[r] = rest % L;
      rest /= L;
    }
    std::complex<double> prod = 1.0;
    for (std::size_t e = 0; e < cells.size(); ++e) {
      const std::int64_t diff = ((theta[cells[e].r] - theta[cells[e].s]) % L + L) % L;
      prod *= table[e][diff];
    }
    re.add(prod.real(), true);
    im.add(prod.imag(), true);
  }
  const double scale = static_cast<double>(points);
  const double real = re.value() / scale;
  const double imag = im.value() / scale;
  if (std::abs(imag) > options.imag_tolerance)
    throw CrossCheckError("collision_prob_dft: imaginary residue " + std::to_string(imag));
  return std::exp(log_m) * real;
}

McEstimate collision_prob_mc(const Assignment& tau, const Assignment& tau_star, double alpha, std::int64_t trials,
                             Rng& rng) {
  if (trials < 1) throw std::invalid_argument("collision_prob_mc: trials must be >= 1");
  if (tau.size() != tau_star.size() || tau.num_types() != tau_star.num_types())
    throw std::invalid_argument("collision_prob_mc: assignments differ in shape");
  const int n = tau.size();
  const int d = tau.num_types();
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const Pool pool = sample_pool(n, alpha, rng);
    const bool same_histogram = histogram_of(tau, pool) == histogram_of(tau_star, pool);
    OverlapMatrix nu(d, 0);
    for (int i = 0; i < n; ++i)
      if (pool[i]) ++nu(tau[i], tau_star[i]);
    if (same_histogram != in_flow_space(nu))
      throw CrossCheckError("collision_prob_mc: histogram equality and flow balance disagree");
    hits += same_histogram;
  }
  McEstimate est;
  est.trials = trials;
  est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
  return est;
}

}  // namespace hqp
