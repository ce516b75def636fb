#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hqp/linalg.hpp"
#include "hqp/model.hpp"
#include "hqp/rate.hpp"
#include "hqp/rng.hpp"

namespace hqp {

/// Directed graph on vertices 0..d-1. Each ordered pair appears at most once,
/// so r->s and s->r are two parallel edges of the underlying multigraph.
/// `loops` declares the d diagonal coordinates as part of the flow space.
struct FlowGraph {
  int d = 0;
  std::vector<VertexPair> edges;
  bool loops = false;

  /// Throws std::invalid_argument on self-loops in `edges`, out-of-range
  /// endpoints or repeated ordered pairs.
  void validate() const;

  /// All d(d-1) ordered pairs in row-major order.
  static FlowGraph complete(int d, bool loops = true);

  /// Connected component index of every vertex, ignoring orientation;
  /// components are numbered 0, 1, ... in order of their smallest vertex.
  std::vector<int> components() const;
  int component_count() const;

  /// Dimension of the flow space on this graph:
  /// |edges| - (d - components) + (loops ? d : 0).
  int flow_dimension() const;
};

/// Edge indices into FlowGraph::edges.
using EdgeSet = std::vector<int>;

/// True iff `tree` is a spanning forest of g: acyclic ignoring orientation,
/// with d - components edges.
bool is_spanning_forest(const FlowGraph& g, std::span<const int> tree);

/// Breadth-first spanning forest from the smallest vertex of each component,
/// scanning edges in list order. On K_d this is the star at vertex 0.
EdgeSet default_spanning_forest(const FlowGraph& g);

/// Depth-first spanning forest scanning edges in reverse order; differs from
/// the default on every graph with a cycle of length >= 3.
EdgeSet alternative_spanning_forest(const FlowGraph& g);

/// Kruskal over a random edge order.
EdgeSet random_spanning_forest(const FlowGraph& g, Rng& rng);

/// Signed cycle-edge incidence matrix of the fundamental cycles of a tree.
struct CycleBasisMatrix {
  /// rows.size() == off_tree.size(); each row has one entry per graph edge.
  std::vector<std::vector<int>> rows;
  EdgeSet tree;
  EdgeSet off_tree;
};

/// Row for off-tree edge u->v: +1 at the edge, then the tree path from v back
/// to u with +1 where the path runs along an edge's orientation, -1 against.
/// Throws std::invalid_argument if `tree` is not a spanning forest.
CycleBasisMatrix fundamental_cycle_basis(const FlowGraph& g, const EdgeSet& tree);

struct TreePolyValue {
  double value = 1.0;
  /// Number of spanning trees (forests) at unit weights.
  std::int64_t nst = 1;
};

/// Every spanning tree of a connected graph as a set of edge indices.
/// ResourceError when more than `max_trees` would be produced.
std::vector<EdgeSet> enumerate_spanning_trees(const FlowGraph& g, std::int64_t max_trees = 5'000'000);

/// Normalized spanning tree polynomial: average over spanning trees of the
/// product of edge weights. Weighted Kirchhoff cofactor (undirected weight
/// w_rs + w_sr) divided by the unit-weight tree count. With `verify`, also
/// sums over enumerated trees (d <= 6) and throws CrossCheckError on a
/// relative disagreement above 1e-12. Throws std::invalid_argument when g is
/// disconnected.
TreePolyValue spanning_tree_polynomial(const FlowGraph& g, const WeightMatrix& w, bool verify = false);

/// Exact sum over spanning trees of the product of weights, by Kirchhoff over
/// the rationals.
Rational kirchhoff_tree_sum(const FlowGraph& g, const ExactMatrix<Rational>& w);

/// Same sum by explicit enumeration.
Rational enumerated_tree_sum(const FlowGraph& g, const ExactMatrix<Rational>& w);

/// Product of spanning_tree_polynomial over connected components; isolated
/// vertices contribute 1.
TreePolyValue forest_polynomial(const FlowGraph& g, const WeightMatrix& w);

/// Gaussian integral of exp(-sum x_e^2 / (2 w_e)) over the flow space of g
/// (induced Lebesgue measure), by the closed form
/// (2 pi)^{k/2} sqrt(prod w / P_G(w)). Diagonal weights enter only when
/// g.loops is set. Throws std::invalid_argument on nonpositive weights.
double gaussian_flow_integral_closed(const FlowGraph& g, const WeightMatrix& w);

/// The same integral from a basis B of the flow space (fundamental cycles of
/// `tree` plus diagonal unit vectors): (2 pi)^{k/2} sqrt(det B'B / det B'AB),
/// A = diag(1/w).
double gaussian_flow_integral_basis(const FlowGraph& g, const WeightMatrix& w, const EdgeSet& tree);

/// Evaluates the basis route with the default and the alternative spanning
/// forest and throws CrossCheckError if they differ by more than 1e-10
/// relative. Returns the default-forest value.
double gaussian_flow_integral_basis(const FlowGraph& g, const WeightMatrix& w);

struct CauchyBinetResult {
  double direct = 0.0;
  double tree_expansion = 0.0;
};

/// det(P M^{-1} P') for the default cycle basis of connected g, M = diag(w on
/// edges), both directly and as the sum over spanning trees T of
/// prod_{e not in T} 1/w_e. Throws CrossCheckError beyond 1e-9 relative.
CauchyBinetResult cauchy_binet_tree_expansion(const FlowGraph& g, const WeightMatrix& w);

/// Exact determinant of the square column-submatrix P[:, columns].
BigInt cycle_minor_determinant(const CycleBasisMatrix& p, std::span<const int> columns);

/// Exact det(P P').
BigInt cycle_gram_determinant(const CycleBasisMatrix& p);

/// Laplacian of the doubled complete graph: sum over r != s of
/// w_rs (e_r - e_s)(e_r - e_s)'.
Matrix laplacian(const WeightMatrix& w);

/// delta^{-2} det(delta^2 I + L(w)) for each delta.
std::vector<double> laplacian_interpolation(const WeightMatrix& w, std::span<const double> deltas);

/// Coefficients c_0..c_d of det(x I + L(w)), c_j = sum of principal minors
/// of size d - j.
std::vector<double> laplacian_char_poly(const WeightMatrix& w);

/// The same coefficients as sums over rooted spanning forests with j roots of
/// the product of undirected weights (d <= 7).
std::vector<double> rooted_forest_expansion(const WeightMatrix& w);

/// (2d)^{-(d-1)/2}.
double constant_cd(int d);

/// (2 pi)^{-(d-1)/2} times the integral of exp(-2 |z 1|^2) over the
/// antisymmetric potential differences z = l 1' - 1 l', by tensor
/// Gauss-Hermite quadrature in d - 1 coordinates with the embedding Jacobian.
double constant_cd_quadrature(int d, int nodes_per_axis = 24);

}  // namespace hqp
