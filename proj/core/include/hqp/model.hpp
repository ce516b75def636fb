#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace hqp {

/// Dense square d x d array, row-major. Used for overlap matrices (integer
/// counts), weight matrices and relaxed flows (reals).
template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int d, T fill = T{}) : d_(d), data_(static_cast<std::size_t>(d) * d, fill) {}

  /// Row-major nested initializer; every row must have the same length as
  /// the number of rows.
  SquareMatrix(std::initializer_list<std::initializer_list<T>> rows);

  int dim() const noexcept { return d_; }

  T& operator()(int r, int s) { return data_[static_cast<std::size_t>(r) * d_ + s]; }
  const T& operator()(int r, int s) const { return data_[static_cast<std::size_t>(r) * d_ + s]; }

  std::span<const T> values() const noexcept { return data_; }

  T row_sum(int r) const;
  T col_sum(int s) const;
  T total() const;

  SquareMatrix transposed() const;

  bool operator==(const SquareMatrix&) const = default;

 private:
  int d_ = 0;
  std::vector<T> data_;
};

using OverlapMatrix = SquareMatrix<std::int64_t>;
using WeightMatrix = SquareMatrix<double>;

/// Converts an integer matrix to reals.
WeightMatrix to_weights(const OverlapMatrix& mu);

/// Probability vector with every entry strictly inside (0,1), d >= 2.
class ProportionVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit ProportionVector(std::vector<double> pi);

  int dim() const noexcept { return static_cast<int>(pi_.size()); }
  double operator[](int r) const { return pi_[static_cast<std::size_t>(r)]; }
  std::span<const double> values() const noexcept { return pi_; }

  /// Uniform vector (1/d, ..., 1/d).
  static ProportionVector uniform(int d);

  bool operator==(const ProportionVector&) const = default;

 private:
  std::vector<double> pi_;
};

/// Type labels of n individuals. Labels are 0-based in memory, in [0, d).
class Assignment {
 public:
  Assignment(std::vector<int> labels, int d);

  int size() const noexcept { return static_cast<int>(labels_.size()); }
  int num_types() const noexcept { return d_; }
  int operator[](int i) const { return labels_[static_cast<std::size_t>(i)]; }
  std::span<const int> labels() const noexcept { return labels_; }

  /// Number of individuals carrying each type.
  std::vector<std::int64_t> type_counts() const;

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<int> labels_;
  int d_;
};

using Histogram = std::vector<std::int64_t>;

/// -sum p_r ln p_r in nats, with 0 ln 0 = 0. Accepts any probability vector
/// (a point mass included), not only validated proportions.
double shannon_entropy(std::span<const double> p);
double shannon_entropy(const ProportionVector& p);

/// Bernoulli Kullback-Leibler divergence D(p || q) in nats.
/// Throws std::domain_error unless q is in (0,1) and p in [0,1].
double kl_bernoulli(double p, double q);

/// Default absolute tolerance for real-valued flow balance.
inline constexpr double kFlowTolerance = 1e-10;

/// Largest |row_sum_r - col_sum_r| over r.
double flow_imbalance(const WeightMatrix& x);
std::int64_t flow_imbalance(const OverlapMatrix& x);

/// Membership in the Eulerian flow space: every row sum equals the matching
/// column sum. Integer inputs are checked exactly.
bool in_flow_space(const WeightMatrix& x, double tol = kFlowTolerance);
bool in_flow_space(const OverlapMatrix& x);

/// mu(r,s) = #{i : tau(i) = r, tau_star(i) = s}.
/// Throws std::invalid_argument on length or type-count mismatch.
OverlapMatrix overlap(const Assignment& tau, const Assignment& tau_star);

}  // namespace hqp
