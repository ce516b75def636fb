#include "hqp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hqp {

template <class T>
SquareMatrix<T>::SquareMatrix(std::initializer_list<std::initializer_list<T>> rows)
    : d_(static_cast<int>(rows.size())) {
  data_.reserve(rows.size() * rows.size());
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw std::invalid_argument("SquareMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

template <class T>
T SquareMatrix<T>::row_sum(int r) const {
  T acc{};
  for (int s = 0; s < d_; ++s) acc += (*this)(r, s);
  return acc;
}

template <class T>
T SquareMatrix<T>::col_sum(int s) const {
  T acc{};
  for (int r = 0; r < d_; ++r) acc += (*this)(r, s);
  return acc;
}

template <class T>
T SquareMatrix<T>::total() const {
  return std::accumulate(data_.begin(), data_.end(), T{});
}

template <class T>
SquareMatrix<T> SquareMatrix<T>::transposed() const {
  SquareMatrix out(d_);
  for (int r = 0; r < d_; ++r)
    for (int s = 0; s < d_; ++s) out(s, r) = (*this)(r, s);
  return out;
}

template class SquareMatrix<std::int64_t>;
template class SquareMatrix<double>;

WeightMatrix to_weights(const OverlapMatrix& mu) {
  WeightMatrix w(mu.dim());
  for (int r = 0; r < mu.dim(); ++r)
    for (int s = 0; s < mu.dim(); ++s) w(r, s) = static_cast<double>(mu(r, s));
  return w;
}

ProportionVector::ProportionVector(std::vector<double> pi) : pi_(std::move(pi)) {
  if (pi_.size() < 2) throw std::invalid_argument("ProportionVector: need d >= 2");
  double sum = 0.0;
  for (double p : pi_) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("ProportionVector: entries must lie strictly in (0,1)");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw std::invalid_argument("ProportionVector: entries must sum to 1 (got " + std::to_string(sum) + ")");
}

ProportionVector ProportionVector::uniform(int d) {
  return ProportionVector(std::vector<double>(static_cast<std::size_t>(d), 1.0 / d));
}

Assignment::Assignment(std::vector<int> labels, int d) : labels_(std::move(labels)), d_(d) {
  if (labels_.empty()) throw std::invalid_argument("Assignment: need n >= 1");
  if (d_ < 1) throw std::invalid_argument("Assignment: need d >= 1");
  for (int t : labels_)
    if (t < 0 || t >= d_) throw std::invalid_argument("Assignment: label out of range");
}

std::vector<std::int64_t> Assignment::type_counts() const {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(d_), 0);
  for (int t : labels_) ++counts[static_cast<std::size_t>(t)];
  return counts;
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

double shannon_entropy(const ProportionVector& p) { return shannon_entropy(p.values()); }

double kl_bernoulli(double p, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("kl_bernoulli: q must lie in (0,1)");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("kl_bernoulli: p must lie in [0,1]");
  double out = 0.0;
  if (p > 0.0) out += p * std::log(p / q);
  if (p < 1.0) out += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return out;
}

double flow_imbalance(const WeightMatrix& x) {
  double worst = 0.0;
  for (int r = 0; r < x.dim(); ++r) worst = std::max(worst, std::abs(x.row_sum(r) - x.col_sum(r)));
  return worst;
}

std::int64_t flow_imbalance(const OverlapMatrix& x) {
  std::int64_t worst = 0;
  for (int r = 0; r < x.dim(); ++r) {
    const std::int64_t diff = x.row_sum(r) - x.col_sum(r);
    worst = std::max(worst, diff < 0 ? -diff : diff);
  }
  return worst;
}

bool in_flow_space(const WeightMatrix& x, double tol) { return flow_imbalance(x) <= tol; }

bool in_flow_space(const OverlapMatrix& x) { return flow_imbalance(x) == 0; }

OverlapMatrix overlap(const Assignment& tau, const Assignment& tau_star) {
  if (tau.size() != tau_star.size()) throw std::invalid_argument("overlap: assignments differ in length");
  if (tau.num_types() != tau_star.num_types())
    throw std::invalid_argument("overlap: assignments differ in number of types");
  OverlapMatrix mu(tau.num_types(), 0);
  for (int i = 0; i < tau.size(); ++i) ++mu(tau[i], tau_star[i]);
  return mu;
}

}  // namespace hqp
