#include "netinfer/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netinfer/errors.hpp"
#include "netinfer/linalg.hpp"
#include "netinfer/matrix_io.hpp"
#include "netinfer/rng.hpp"

namespace netinfer {

namespace {
constexpr double kEdgeTol = 1e-12;
constexpr double kRowSumTol = 1e-9;
}  // namespace

int Graph::edge_count() const {
  const int total = adj.sum();
  return directed ? total : total / 2;
}

int Graph::max_in_degree() const {
  int best = 0;
  for (int i = 0; i < n; ++i) best = std::max(best, int(adj.row(i).sum()));
  return best;
}

void Graph::validate() const {
  if (n < 2) throw ParameterError("Graph: need at least 2 nodes");
  if (adj.rows() != n || adj.cols() != n)
    throw ParameterError("Graph: adjacency shape mismatch");
  for (int i = 0; i < n; ++i) {
    if (adj(i, i) != 0) throw ParameterError("Graph: nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      if (adj(i, j) != 0 && adj(i, j) != 1)
        throw ParameterError("Graph: adjacency must be binary");
      if (!directed && adj(i, j) != adj(j, i))
        throw ParameterError("Graph: undirected adjacency must be symmetric");
    }
  }
}

InteractionMatrix InteractionMatrix::from_matrix(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw ParameterError("InteractionMatrix: matrix must be square");
  if ((a.array() < 0.0).any())
    throw AssumptionError("InteractionMatrix: negative entries");
  InteractionMatrix m;
  m.a = a;
  const Eigen::VectorXd sums = a.rowwise().sum();
  const double smax = sums.maxCoeff(), smin = sums.minCoeff();
  if (smax - smin <= kRowSumTol * std::max(1.0, std::abs(smax))) {
    m.rho = smax;
    m.rho_is_row_sum = true;
  } else {
    m.rho = spectral_radius(a);
    m.rho_is_row_sum = false;
  }
  m.alpha = 0.0;
  return m;
}

std::vector<int> ObservedSet::complement() const {
  std::vector<char> in(n_total, 0);
  for (int i : indices) in[i] = 1;
  std::vector<int> out;
  out.reserve(n_total - size());
  for (int i = 0; i < n_total; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

void ObservedSet::validate() const {
  if (indices.empty()) throw ParameterError("ObservedSet: empty");
  if (n_total < static_cast<int>(indices.size()))
    throw ParameterError("ObservedSet: more indices than nodes");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= n_total)
      throw ParameterError("ObservedSet: index out of range");
    if (k > 0 && indices[k] <= indices[k - 1])
      throw ParameterError("ObservedSet: indices must be sorted and distinct");
  }
}

Graph erdos_renyi(int n, double p, bool directed, std::uint64_t seed) {
  if (n < 2) throw ParameterError("erdos_renyi: need n >= 2");
  if (!(p >= 0.0 && p <= 1.0))
    throw ParameterError("erdos_renyi: p must lie in [0, 1]");
  Graph g;
  g.n = n;
  g.directed = directed;
  g.adj = Eigen::MatrixXi::Zero(n, n);
  Rng rng(seed);
  if (directed) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (rng.uniform01() < p) g.adj(i, j) = 1;
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform01() < p) g.adj(i, j) = g.adj(j, i) = 1;
  }
  return g;
}

InteractionMatrix laplacian_weights(const Graph& g, double alpha, double rho) {
  g.validate();
  if (!(alpha > 0.0 && alpha <= rho && rho < 1.0))
    throw ParameterError("laplacian_weights: need 0 < alpha <= rho < 1");
  const int d_max = g.max_in_degree();
  if (d_max == 0)
    throw DegenerateInputError("laplacian_weights: graph has no edges");
  InteractionMatrix m;
  m.a = Eigen::MatrixXd::Zero(g.n, g.n);
  for (int i = 0; i < g.n; ++i) {
    double off = 0.0;
    for (int j = 0; j < g.n; ++j) {
      if (i == j) continue;
      if (g.adj(i, j)) {
        m.a(i, j) = alpha / d_max;
        off += m.a(i, j);
      }
    }
    m.a(i, i) = rho - off;  // row sum is exactly rho
  }
  m.rho = rho;
  m.alpha = alpha;
  m.rho_is_row_sum = true;
  return m;
}

Graph graph_from_matrix(const Eigen::MatrixXd& m,
                        std::optional<bool> directed_override) {
  if (m.rows() != m.cols())
    throw FormatError("adjacency: matrix must be square");
  if (m.rows() < 2) throw ParameterError("adjacency: need at least 2 nodes");
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXi adj(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      adj(i, j) = (i != j && std::abs(m(i, j)) > kEdgeTol) ? 1 : 0;
  const bool symmetric = adj == adj.transpose();
  Graph g;
  g.n = n;
  g.directed = directed_override ? *directed_override : !symmetric;
  if (!g.directed && !symmetric)
    throw FormatError(
        "adjacency: matrix is not symmetric but was requested undirected");
  g.adj = adj;
  g.validate();
  return g;
}

Graph load_adjacency(const std::string& path,
                     std::optional<bool> directed_override) {
  return graph_from_matrix(load_matrix(path), directed_override);
}

ObservedSet sample_observed(int n_total, int n_obs, std::uint64_t seed) {
  if (n_total < 1) throw ParameterError("sample_observed: need n_total >= 1");
  if (n_obs < 1 || n_obs > n_total)
    throw ParameterError("sample_observed: need 1 <= n_obs <= n_total");
  std::vector<int> idx(n_total);
  for (int i = 0; i < n_total; ++i) idx[i] = i;
  Rng rng(seed);
  // Partial Fisher-Yates: the first n_obs slots become the sample.
  for (int i = 0; i < n_obs; ++i) {
    const int j = i + static_cast<int>(rng.uniform_below(n_total - i));
    std::swap(idx[i], idx[j]);
  }
  ObservedSet s;
  s.n_total = n_total;
  s.indices.assign(idx.begin(), idx.begin() + n_obs);
  std::sort(s.indices.begin(), s.indices.end());
  return s;
}

ObservedSet full_observed(int n_total) {
  ObservedSet s;
  s.n_total = n_total;
  s.indices.resize(n_total);
  for (int i = 0; i < n_total; ++i) s.indices[i] = i;
  return s;
}

Eigen::MatrixXi observed_support(const Graph& g, const ObservedSet& s) {
  s.validate();
  if (s.n_total != g.n)
    throw ParameterError("observed_support: set refers to " +
                         std::to_string(s.n_total) + " nodes, graph has " +
                         std::to_string(g.n));
  const int k = s.size();
  Eigen::MatrixXi t(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) t(i, j) = g.adj(s.indices[i], s.indices[j]);
  return t;
}

}  // namespace netinfer
