#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace netinfer {

// Binary adjacency with zero diagonal. Orientation convention throughout:
// adj(i, j) = 1 encodes an arrow j -> i (column node influences row node),
// so the in-degree of node i is the i-th row sum. Undirected graphs keep a
// symmetric adjacency.
struct Graph {
  int n = 0;
  bool directed = false;
  Eigen::MatrixXi adj;

  int edge_count() const;     // undirected edges counted once
  int max_in_degree() const;  // max row sum
  void validate() const;
};

// Nonnegative coupling matrix with known scale parameters. Rows of a
// Laplacian-rule matrix sum to exactly rho; matrices loaded from files carry
// rho as a spectral-radius estimate instead (rho_is_row_sum = false).
struct InteractionMatrix {
  Eigen::MatrixXd a;
  double rho = 0.0;
  double alpha = 0.0;
  bool rho_is_row_sum = false;

  int n() const { return static_cast<int>(a.rows()); }
  static InteractionMatrix from_matrix(const Eigen::MatrixXd& a);
};

// Sorted distinct node indices of the observed subset.
struct ObservedSet {
  std::vector<int> indices;
  int n_total = 0;

  int size() const { return static_cast<int>(indices.size()); }
  std::vector<int> complement() const;
  void validate() const;
};

// Erdos-Renyi / binomial graph: every (unordered or ordered) node pair gets
// an independent edge with probability p. Pairs are visited in row-major
// order with one uniform draw each, so samples are reproducible across
// platforms for a fixed seed.
Graph erdos_renyi(int n, double p, bool directed, std::uint64_t seed);

// Degree-normalized weights on a graph: a(i,j) = alpha * adj(i,j) / d_max for
// i != j with d_max the maximum in-degree, and diagonal entries chosen so
// every row sums to exactly rho. Requires 0 < alpha <= rho < 1 and at least
// one edge.
InteractionMatrix laplacian_weights(const Graph& g, double alpha, double rho);

// Loads an adjacency matrix in matrix text format. Entries with
// |x| > 1e-12 are treated as edges; the diagonal is ignored. Directedness is
// inferred from symmetry of the binarized matrix unless overridden.
Graph load_adjacency(const std::string& path,
                     std::optional<bool> directed_override = std::nullopt);
Graph graph_from_matrix(const Eigen::MatrixXd& m,
                        std::optional<bool> directed_override = std::nullopt);

// Uniform sample of n_obs distinct nodes out of n_total, returned sorted.
ObservedSet sample_observed(int n_total, int n_obs, std::uint64_t seed);
ObservedSet full_observed(int n_total);

// Adjacency restricted to the observed subset, in observed-local indexing.
Eigen::MatrixXi observed_support(const Graph& g, const ObservedSet& s);

}  // namespace netinfer
