#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <utility>
#include <vector>

namespace grc {

using SpMat = Eigen::SparseMatrix<double>;
using SpMatRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

// Undirected weighted graph held as a compressed symmetric adjacency matrix
// (both (i,j) and (j,i) stored, rows sorted). Built through build_graph or
// graph_from_adjacency, which establish the invariants everything downstream
// relies on: strictly positive weights, no self loops, exact symmetry.
class Graph {
 public:
  Graph() = default;

  int num_nodes() const { return static_cast<int>(adj_.rows()); }
  std::int64_t num_edges() const { return adj_.nonZeros() / 2; }

  const SpMatRow& adjacency() const { return adj_; }

  // Weighted degree.
  double degree(int i) const { return degrees_[i]; }
  const Eigen::VectorXd& degrees() const { return degrees_; }

  // Number of distinct neighbors.
  int neighbor_count(int i) const {
    return static_cast<int>(adj_.outerIndexPtr()[i + 1] - adj_.outerIndexPtr()[i]);
  }

  bool has_isolated_nodes() const;

  // Canonical edge enumeration: u < v, lexicographically sorted.
  std::vector<WeightedEdge> edges() const;

  // Weight of edge {u, v}, or 0 if absent.
  double edge_weight(int u, int v) const { return adj_.coeff(u, v); }

  // Original labels of the nodes (one per node, empty = identity). Reduction
  // methods that keep a subset of nodes record here which fine node each
  // coarse node is.
  std::vector<int> node_ids;

  // How many self loops the ingestion dropped.
  int self_loops_dropped = 0;

 private:
  friend Graph build_graph(const std::vector<WeightedEdge>&, std::optional<int>);
  friend Graph graph_from_adjacency(const SpMat&, double);

  SpMatRow adj_;
  Eigen::VectorXd degrees_;
};

// Builds a graph from an undirected edge list (each edge listed once, 0-based
// ids). Duplicate edges have their weights summed (weighted-multigraph
// collapse). Self loops are dropped and counted. Throws std::invalid_argument
// on non-positive or non-finite weights and on ids outside [0, num_nodes).
// Without an explicit node count, n = max id + 1.
Graph build_graph(const std::vector<WeightedEdge>& edge_list,
                  std::optional<int> num_nodes = std::nullopt);

// Builds a graph from a symmetric weighted adjacency matrix: diagonal ignored,
// entries with |a_ij| <= prune_tol dropped, negative entries rejected.
// Asymmetry beyond a 1e-12 relative tolerance is rejected.
Graph graph_from_adjacency(const SpMat& a, double prune_tol = 0.0);

enum class LaplacianKind { combinatorial, normalized };

// L = D - A, or the degree-normalized form D^{-1/2} L D^{-1/2}. The
// normalized form is undefined when the graph has isolated nodes (singular D)
// and errors in that case.
struct LaplacianMatrix {
  LaplacianKind kind = LaplacianKind::combinatorial;
  SpMat matrix;
  Eigen::VectorXd degrees;  // weighted degrees of the source graph

  int size() const { return static_cast<int>(matrix.rows()); }
};

LaplacianMatrix laplacian(const Graph& g, LaplacianKind kind = LaplacianKind::combinatorial);

// Signed edge-incidence factor B with B B^T = L (combinatorial). Column e for
// edge {u, v} with u < v carries -sqrt(w) at row u and +sqrt(w) at row v.
// Columns follow the canonical edge enumeration.
struct IncidenceMatrix {
  SpMat matrix;                                 // n x m
  std::vector<std::pair<int, int>> edge_order;  // (u, v) per column, u < v
};

IncidenceMatrix incidence(const Graph& g);

// x^T L x. Dimension mismatch throws std::invalid_argument.
double quadratic_form(const LaplacianMatrix& l, const Eigen::VectorXd& x);

// Component id per node (ids are 0..count-1 in order of first appearance by
// lowest node id) plus the component count.
struct Components {
  int count = 0;
  std::vector<int> label;
};

Components connected_components(const Graph& g);

// Checks the Laplacian closure properties: symmetry, non-positive
// off-diagonal entries (up to offdiag_tol) and row sums within rowsum_tol
// of zero. Tolerances are absolute; callers usually scale them by the
// largest magnitude entry.
bool is_valid_laplacian(const Eigen::MatrixXd& m, double rowsum_tol, double offdiag_tol);
bool is_valid_laplacian(const SpMat& m, double rowsum_tol, double offdiag_tol);

}  // namespace grc
