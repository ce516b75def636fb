#include "hqp/flow_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

#include "hqp/error.hpp"

namespace hqp {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  /// False when x and y were already joined.
  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    parent_[std::max(x, y)] = std::min(x, y);
    return true;
  }

 private:
  std::vector<int> parent_;
};

void require_connected(const FlowGraph& g, const char* who) {
  if (g.component_count() != 1) throw std::invalid_argument(std::string(who) + ": graph is disconnected");
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Weighted Laplacian of g with undirected weight w_rs + w_sr per adjacent pair,
// over any ring T; `weight(e)` gives the weight of edge index e.
template <class T, class Weight>
ExactMatrix<T> graph_laplacian(const FlowGraph& g, Weight weight) {
  ExactMatrix<T> lap(static_cast<std::size_t>(g.d), std::vector<T>(static_cast<std::size_t>(g.d), T(0)));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [r, s] = g.edges[e];
    const T we = weight(static_cast<int>(e));
    lap[r][r] += we;
    lap[s][s] += we;
    lap[r][s] -= we;
    lap[s][r] -= we;
  }
  return lap;
}

template <class T>
ExactMatrix<T> drop_last(ExactMatrix<T> a) {
  a.pop_back();
  for (auto& row : a) row.pop_back();
  return a;
}

Matrix to_matrix(const ExactMatrix<double>& a) {
  Matrix out(a.size(), a.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a.size(); ++c) out(r, c) = a[r][c];
  return out;
}

std::int64_t count_trees(const FlowGraph& g) {
  if (g.d <= 1) return 1;
  const auto lap = drop_last(graph_laplacian<BigInt>(g, [](int) { return BigInt(1); }));
  const BigInt n = bareiss_determinant(lap);
  if (n > std::numeric_limits<std::int64_t>::max()) throw ResourceError("spanning tree count exceeds 2^63");
  return static_cast<std::int64_t>(n);
}

double edge_weight(const FlowGraph& g, const WeightMatrix& w, int e) { return w(g.edges[e].first, g.edges[e].second); }

void check_weights(const FlowGraph& g, const WeightMatrix& w) {
  if (w.dim() != g.d) throw std::invalid_argument("weight matrix dimension differs from graph");
}

struct Subgraph {
  FlowGraph graph;
  WeightMatrix weights;
};

std::vector<Subgraph> split_components(const FlowGraph& g, const WeightMatrix& w) {
  const auto comp = g.components();
  const int count = g.component_count();
  std::vector<std::vector<int>> members(static_cast<std::size_t>(count));
  std::vector<int> local(static_cast<std::size_t>(g.d));
  for (int v = 0; v < g.d; ++v) {
    local[v] = static_cast<int>(members[comp[v]].size());
    members[comp[v]].push_back(v);
  }
  std::vector<Subgraph> out;
  for (int c = 0; c < count; ++c) {
    const int size = static_cast<int>(members[c].size());
    Subgraph sub{FlowGraph{size, {}, g.loops}, WeightMatrix(size, 0.0)};
    for (int a = 0; a < size; ++a)
      for (int b = 0; b < size; ++b) sub.weights(a, b) = w(members[c][a], members[c][b]);
    for (auto [r, s] : g.edges)
      if (comp[r] == c) sub.graph.edges.emplace_back(local[r], local[s]);
    out.push_back(std::move(sub));
  }
  return out;
}

}  // namespace

void FlowGraph::validate() const {
  if (d < 1) throw std::invalid_argument("FlowGraph: need d >= 1");
  std::set<VertexPair> seen;
  for (auto [r, s] : edges) {
    if (r < 0 || s < 0 || r >= d || s >= d) throw std::invalid_argument("FlowGraph: endpoint out of range");
    if (r == s) throw std::invalid_argument("FlowGraph: self-loops belong in the diagonal, not the edge list");
    if (!seen.insert({r, s}).second) throw std::invalid_argument("FlowGraph: repeated directed edge");
  }
}

FlowGraph FlowGraph::complete(int d, bool loops) {
  if (d < 1) throw std::invalid_argument("FlowGraph::complete: need d >= 1");
  FlowGraph g{d, {}, loops};
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      if (r != s) g.edges.emplace_back(r, s);
  return g;
}

std::vector<int> FlowGraph::components() const {
  DisjointSets sets(d);
  for (auto [r, s] : edges) sets.unite(r, s);
  std::vector<int> label(static_cast<std::size_t>(d), -1);
  std::vector<int> root_label(static_cast<std::size_t>(d), -1);
  int next = 0;
  for (int v = 0; v < d; ++v) {
    const int root = sets.find(v);
    if (root_label[root] < 0) root_label[root] = next++;
    label[v] = root_label[root];
  }
  return label;
}

int FlowGraph::component_count() const {
  const auto comp = components();
  return comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
}

int FlowGraph::flow_dimension() const {
  return static_cast<int>(edges.size()) - (d - component_count()) + (loops ? d : 0);
}

bool is_spanning_forest(const FlowGraph& g, std::span<const int> tree) {
  if (static_cast<int>(tree.size()) != g.d - g.component_count()) return false;
  std::set<int> distinct(tree.begin(), tree.end());
  if (distinct.size() != tree.size()) return false;
  DisjointSets sets(g.d);
  for (int e : tree) {
    if (e < 0 || e >= static_cast<int>(g.edges.size())) return false;
    if (!sets.unite(g.edges[e].first, g.edges[e].second)) return false;
  }
  return true;
}

EdgeSet default_spanning_forest(const FlowGraph& g) {
  std::vector<char> seen(static_cast<std::size_t>(g.d), 0);
  EdgeSet tree;
  for (int start = 0; start < g.d; ++start) {
    if (seen[start]) continue;
    seen[start] = 1;
    std::queue<int> frontier;
    frontier.push(start);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto [r, s] = g.edges[e];
        const int other = r == u ? s : (s == u ? r : -1);
        if (other < 0 || seen[other]) continue;
        seen[other] = 1;
        tree.push_back(static_cast<int>(e));
        frontier.push(other);
      }
    }
  }
  return tree;
}

EdgeSet alternative_spanning_forest(const FlowGraph& g) {
  std::vector<char> seen(static_cast<std::size_t>(g.d), 0);
  EdgeSet tree;
  std::function<void(int)> visit = [&](int u) {
    seen[u] = 1;
    for (std::size_t k = g.edges.size(); k-- > 0;) {
      const auto [r, s] = g.edges[k];
      const int other = r == u ? s : (s == u ? r : -1);
      if (other < 0 || seen[other]) continue;
      tree.push_back(static_cast<int>(k));
      visit(other);
    }
  };
  for (int v = 0; v < g.d; ++v)
    if (!seen[v]) visit(v);
  return tree;
}

EdgeSet random_spanning_forest(const FlowGraph& g, Rng& rng) {
  std::vector<int> order(g.edges.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle(std::span<int>(order), rng);
  DisjointSets sets(g.d);
  EdgeSet tree;
  for (int e : order)
    if (sets.unite(g.edges[e].first, g.edges[e].second)) tree.push_back(e);
  return tree;
}

CycleBasisMatrix fundamental_cycle_basis(const FlowGraph& g, const EdgeSet& tree) {
  g.validate();
  if (!is_spanning_forest(g, tree)) throw std::invalid_argument("fundamental_cycle_basis: not a spanning forest");
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(g.d));  // (neighbor, edge)
  std::vector<char> in_tree(g.edges.size(), 0);
  for (int e : tree) {
    in_tree[e] = 1;
    adj[g.edges[e].first].emplace_back(g.edges[e].second, e);
    adj[g.edges[e].second].emplace_back(g.edges[e].first, e);
  }

  CycleBasisMatrix out;
  out.tree = tree;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (in_tree[e]) continue;
    const auto [u, v] = g.edges[e];
    std::vector<int> row(g.edges.size(), 0);
    row[e] = 1;

    // Tree path from v to u: parents from a search rooted at v, read back from u.
    std::vector<std::pair<int, int>> parent(static_cast<std::size_t>(g.d), {-1, -1});
    std::vector<char> seen(static_cast<std::size_t>(g.d), 0);
    std::queue<int> frontier;
    frontier.push(v);
    seen[v] = 1;
    while (!frontier.empty()) {
      const int a = frontier.front();
      frontier.pop();
      for (auto [b, f] : adj[a])
        if (!seen[b]) {
          seen[b] = 1;
          parent[b] = {a, f};
          frontier.push(b);
        }
    }
    for (int b = u; b != v; b = parent[b].first) {
      const auto [a, f] = parent[b];  // the path steps a -> b
      row[f] = g.edges[f] == VertexPair{a, b} ? 1 : -1;
    }
    out.rows.push_back(std::move(row));
    out.off_tree.push_back(static_cast<int>(e));
  }
  return out;
}

std::vector<EdgeSet> enumerate_spanning_trees(const FlowGraph& g, std::int64_t max_trees) {
  g.validate();
  require_connected(g, "enumerate_spanning_trees");
  const int need = g.d - 1;
  const int m = static_cast<int>(g.edges.size());
  std::vector<EdgeSet> trees;
  EdgeSet chosen;
  std::function<void(int, const DisjointSets&)> step = [&](int e, const DisjointSets& sets) {
    if (static_cast<int>(chosen.size()) == need) {
      if (static_cast<std::int64_t>(trees.size()) >= max_trees)
        throw ResourceError("enumerate_spanning_trees: more than " + std::to_string(max_trees) + " trees");
      trees.push_back(chosen);
      return;
    }
    if (m - e < need - static_cast<int>(chosen.size())) return;
    DisjointSets with = sets;
    if (with.unite(g.edges[e].first, g.edges[e].second)) {
      chosen.push_back(e);
      step(e + 1, with);
      chosen.pop_back();
    }
    step(e + 1, sets);
  };
  step(0, DisjointSets(g.d));
  return trees;
}

TreePolyValue spanning_tree_polynomial(const FlowGraph& g, const WeightMatrix& w, bool verify) {
  g.validate();
  check_weights(g, w);
  require_connected(g, "spanning_tree_polynomial");
  TreePolyValue out;
  out.nst = count_trees(g);
  if (g.d <= 1) return out;
  const auto lap = graph_laplacian<double>(g, [&](int e) { return edge_weight(g, w, e); });
  out.value = determinant(to_matrix(drop_last(lap))) / static_cast<double>(out.nst);

  if (verify && g.d <= 6) {
    double sum = 0.0;
    for (const auto& tree : enumerate_spanning_trees(g)) {
      double prod = 1.0;
      for (int e : tree) prod *= edge_weight(g, w, e);
      sum += prod;
    }
    const double enumerated = sum / static_cast<double>(out.nst);
    if (relative_gap(enumerated, out.value) > 1e-12)
      throw CrossCheckError("spanning_tree_polynomial: Kirchhoff " + std::to_string(out.value) +
                            " vs enumeration " + std::to_string(enumerated));
  }
  return out;
}

Rational kirchhoff_tree_sum(const FlowGraph& g, const ExactMatrix<Rational>& w) {
  g.validate();
  require_connected(g, "kirchhoff_tree_sum");
  if (g.d <= 1) return 1;
  const auto lap = graph_laplacian<Rational>(g, [&](int e) { return w[g.edges[e].first][g.edges[e].second]; });
  return rational_determinant(drop_last(lap));
}

Rational enumerated_tree_sum(const FlowGraph& g, const ExactMatrix<Rational>& w) {
  Rational sum = 0;
  for (const auto& tree : enumerate_spanning_trees(g)) {
    Rational prod = 1;
    for (int e : tree) prod *= w[g.edges[e].first][g.edges[e].second];
    sum += prod;
  }
  return sum;
}

TreePolyValue forest_polynomial(const FlowGraph& g, const WeightMatrix& w) {
  g.validate();
  check_weights(g, w);
  TreePolyValue out;
  for (const auto& sub : split_components(g, w)) {
    const auto part = spanning_tree_polynomial(sub.graph, sub.weights);
    out.value *= part.value;
    out.nst *= part.nst;
  }
  return out;
}

namespace {

void check_positive(const FlowGraph& g, const WeightMatrix& w) {
  check_weights(g, w);
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
    if (!(edge_weight(g, w, e) > 0.0)) throw std::invalid_argument("Gaussian flow integral: weights must be positive");
  if (g.loops)
    for (int r = 0; r < g.d; ++r)
      if (!(w(r, r) > 0.0)) throw std::invalid_argument("Gaussian flow integral: diagonal weights must be positive");
}

double log_weight_product(const FlowGraph& g, const WeightMatrix& w) {
  double acc = 0.0;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) acc += std::log(edge_weight(g, w, e));
  if (g.loops)
    for (int r = 0; r < g.d; ++r) acc += std::log(w(r, r));
  return acc;
}

}  // namespace

double gaussian_flow_integral_closed(const FlowGraph& g, const WeightMatrix& w) {
  g.validate();
  check_positive(g, w);
  const double k = g.flow_dimension();
  const double p = forest_polynomial(g, w).value;
  return std::exp(0.5 * k * std::log(2.0 * std::numbers::pi) + 0.5 * (log_weight_product(g, w) - std::log(p)));
}

double gaussian_flow_integral_basis(const FlowGraph& g, const WeightMatrix& w, const EdgeSet& tree) {
  g.validate();
  check_positive(g, w);
  const auto basis = fundamental_cycle_basis(g, tree);
  const std::size_t cycles = basis.rows.size();
  const std::size_t k = cycles + (g.loops ? static_cast<std::size_t>(g.d) : 0);

  // Coordinates are the edges followed by the diagonal; diagonal basis
  // vectors are orthogonal to every cycle, so the Gram matrices are block
  // diagonal.
  Matrix gram(k, k);
  Matrix weighted(k, k);
  for (std::size_t i = 0; i < cycles; ++i)
    for (std::size_t j = 0; j < cycles; ++j) {
      double a = 0.0;
      double b = 0.0;
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const double prod = basis.rows[i][e] * basis.rows[j][e];
        a += prod;
        b += prod / edge_weight(g, w, static_cast<int>(e));
      }
      gram(i, j) = a;
      weighted(i, j) = b;
    }
  if (g.loops)
    for (int r = 0; r < g.d; ++r) {
      gram(cycles + r, cycles + r) = 1.0;
      weighted(cycles + r, cycles + r) = 1.0 / w(r, r);
    }
  const double det_gram = determinant(gram);
  const double det_weighted = determinant(weighted);
  if (!(det_weighted > 0.0)) throw CrossCheckError("gaussian_flow_integral_basis: singular weighted Gram matrix");
  return std::exp(0.5 * static_cast<double>(k) * std::log(2.0 * std::numbers::pi) +
                  0.5 * (std::log(det_gram) - std::log(det_weighted)));
}

double gaussian_flow_integral_basis(const FlowGraph& g, const WeightMatrix& w) {
  const double first = gaussian_flow_integral_basis(g, w, default_spanning_forest(g));
  const double second = gaussian_flow_integral_basis(g, w, alternative_spanning_forest(g));
  if (relative_gap(first, second) > 1e-10)
    throw CrossCheckError("gaussian_flow_integral_basis: value depends on the spanning tree");
  return first;
}

CauchyBinetResult cauchy_binet_tree_expansion(const FlowGraph& g, const WeightMatrix& w) {
  g.validate();
  check_weights(g, w);
  require_connected(g, "cauchy_binet_tree_expansion");
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
    if (!(edge_weight(g, w, e) > 0.0)) throw std::invalid_argument("cauchy_binet_tree_expansion: weights must be positive");
  const auto basis = fundamental_cycle_basis(g, default_spanning_forest(g));
  const std::size_t k = basis.rows.size();
  Matrix m(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t e = 0; e < g.edges.size(); ++e)
        m(i, j) += basis.rows[i][e] * basis.rows[j][e] / edge_weight(g, w, static_cast<int>(e));

  CauchyBinetResult out;
  out.direct = determinant(m);
  for (const auto& tree : enumerate_spanning_trees(g)) {
    std::vector<char> in_tree(g.edges.size(), 0);
    for (int e : tree) in_tree[e] = 1;
    double prod = 1.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      if (!in_tree[e]) prod /= edge_weight(g, w, static_cast<int>(e));
    out.tree_expansion += prod;
  }
  if (relative_gap(out.direct, out.tree_expansion) > 1e-9)
    throw CrossCheckError("cauchy_binet_tree_expansion: direct determinant and tree sum disagree");
  return out;
}

BigInt cycle_minor_determinant(const CycleBasisMatrix& p, std::span<const int> columns) {
  if (columns.size() != p.rows.size()) throw std::invalid_argument("cycle_minor_determinant: minor is not square");
  ExactMatrix<BigInt> minor;
  for (const auto& row : p.rows) {
    std::vector<BigInt> r;
    for (int c : columns) r.emplace_back(row.at(static_cast<std::size_t>(c)));
    minor.push_back(std::move(r));
  }
  return bareiss_determinant(std::move(minor));
}

BigInt cycle_gram_determinant(const CycleBasisMatrix& p) {
  const std::size_t k = p.rows.size();
  ExactMatrix<BigInt> gram(k, std::vector<BigInt>(k, BigInt(0)));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      long long acc = 0;
      for (std::size_t e = 0; e < p.rows[i].size(); ++e) acc += p.rows[i][e] * p.rows[j][e];
      gram[i][j] = acc;
    }
  return bareiss_determinant(std::move(gram));
}

Matrix laplacian(const WeightMatrix& w) {
  const auto d = static_cast<std::size_t>(w.dim());
  Matrix lap(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t s = 0; s < d; ++s) {
      if (r == s) continue;
      const double x = w(static_cast<int>(r), static_cast<int>(s));
      lap(r, r) += x;
      lap(s, s) += x;
      lap(r, s) -= x;
      lap(s, r) -= x;
    }
  return lap;
}

std::vector<double> laplacian_interpolation(const WeightMatrix& w, std::span<const double> deltas) {
  const Matrix lap = laplacian(w);
  std::vector<double> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    if (!(delta > 0.0)) throw std::invalid_argument("laplacian_interpolation: deltas must be positive");
    Matrix shifted = lap;
    for (std::size_t r = 0; r < lap.rows(); ++r) shifted(r, r) += delta * delta;
    out.push_back(determinant(shifted) / (delta * delta));
  }
  return out;
}

std::vector<double> laplacian_char_poly(const WeightMatrix& w) {
  const int d = w.dim();
  if (d > 16) throw ResourceError("laplacian_char_poly: d above 16");
  const Matrix lap = laplacian(w);
  std::vector<double> coeff(static_cast<std::size_t>(d + 1), 0.0);
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    std::vector<std::size_t> idx;
    for (int r = 0; r < d; ++r)
      if (mask >> r & 1u) idx.push_back(static_cast<std::size_t>(r));
    Matrix minor(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) minor(a, b) = lap(idx[a], idx[b]);
    coeff[static_cast<std::size_t>(d) - idx.size()] += idx.empty() ? 1.0 : determinant(minor);
  }
  return coeff;
}

std::vector<double> rooted_forest_expansion(const WeightMatrix& w) {
  const int d = w.dim();
  if (d > 7) throw ResourceError("rooted_forest_expansion: d above 7");
  std::vector<VertexPair> pairs;
  std::vector<double> weight;
  for (int r = 0; r < d; ++r)
    for (int s = r + 1; s < d; ++s) {
      pairs.emplace_back(r, s);
      weight.push_back(w(r, s) + w(s, r));
    }
  std::vector<double> coeff(static_cast<std::size_t>(d + 1), 0.0);
  for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
    DisjointSets sets(d);
    double prod = 1.0;
    int used = 0;
    bool forest = true;
    for (std::size_t e = 0; e < pairs.size() && forest; ++e) {
      if (!(mask >> e & 1u)) continue;
      forest = sets.unite(pairs[e].first, pairs[e].second);
      prod *= weight[e];
      ++used;
    }
    if (!forest || used > d - 1) continue;
    std::vector<int> size(static_cast<std::size_t>(d), 0);
    for (int v = 0; v < d; ++v) ++size[sets.find(v)];
    double roots = 1.0;
    for (int s : size)
      if (s > 0) roots *= s;
    coeff[static_cast<std::size_t>(d - used)] += prod * roots;
  }
  return coeff;
}

double constant_cd(int d) {
  if (d < 2) throw std::invalid_argument("constant_cd: need d >= 2");
  return std::pow(2.0 * d, -(d - 1) / 2.0);
}

double constant_cd_quadrature(int d, int nodes_per_axis) {
  if (d < 2) throw std::invalid_argument("constant_cd_quadrature: need d >= 2");
  const auto k = static_cast<std::size_t>(d - 1);
  double points = std::pow(static_cast<double>(nodes_per_axis), static_cast<double>(k));
  if (points > 1e8) throw ResourceError("constant_cd_quadrature: grid above 1e8 points");

  // Potentials (t, 0). Embedding t -> z = l 1' - 1 l' in R^{d x d}, and
  // t -> z 1 in R^d.
  Matrix embed(static_cast<std::size_t>(d * d), k);
  Matrix row_sums(static_cast<std::size_t>(d), k);
  for (std::size_t i = 0; i < k; ++i)
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) {
        const double z = (r == static_cast<int>(i)) - (s == static_cast<int>(i));
        embed(static_cast<std::size_t>(r * d + s), i) = z;
        row_sums(static_cast<std::size_t>(r), i) += z;
      }
  const double jacobian = std::sqrt(determinant(embed.transposed() * embed));
  const Matrix q = row_sums.transposed() * row_sums;

  // exp(-2 t'Qt) with t = u / sigma leaves exp(-|u|^2) times a residual
  // Gaussian that is bounded once sigma^2 <= 2 lambda_min(Q).
  const double sigma2 = 2.0 * symmetric_eigenvalues(q).front();
  const double sigma = std::sqrt(sigma2);
  const QuadratureRule rule = gauss_hermite(nodes_per_axis);

  std::vector<std::size_t> idx(k, 0);
  std::vector<double> u(k);
  double sum = 0.0;
  for (;;) {
    double wprod = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      u[i] = rule.nodes[idx[i]];
      wprod *= rule.weights[idx[i]];
    }
    double quad = 0.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      norm2 += u[i] * u[i];
      for (std::size_t j = 0; j < k; ++j) quad += u[i] * q(i, j) * u[j];
    }
    sum += wprod * std::exp(-(2.0 * quad / sigma2 - norm2));

    std::size_t pos = 0;
    while (pos < k && ++idx[pos] == static_cast<std::size_t>(nodes_per_axis)) idx[pos++] = 0;
    if (pos == k) break;
  }
  const double integral = jacobian * std::pow(sigma, -static_cast<double>(k)) * sum;
  return integral / std::pow(2.0 * std::numbers::pi, static_cast<double>(k) / 2.0);
}

}  // namespace hqp
