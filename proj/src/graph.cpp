#include "grc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "grc/errors.hpp"

namespace grc {

namespace {

struct AssembledParts {
  SpMatRow adj;
  Eigen::VectorXd degrees;
};

// Shared tail of the two constructors: assemble the symmetric CSR matrix
// from deduplicated half-edges (u < v) and cache weighted degrees. Degrees
// are summed in stored row order, the same order a row-major matvec uses.
AssembledParts assemble(int n, const std::vector<WeightedEdge>& half_edges) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(half_edges.size() * 2);
  for (const auto& e : half_edges) {
    trips.emplace_back(e.u, e.v, e.w);
    trips.emplace_back(e.v, e.u, e.w);
  }
  AssembledParts parts;
  SpMatRow adj(n, n);
  adj.setFromTriplets(trips.begin(), trips.end());
  adj.makeCompressed();
  parts.adj = std::move(adj);
  parts.degrees = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    for (SpMatRow::InnerIterator it(parts.adj, i); it; ++it) d += it.value();
    parts.degrees[i] = d;
  }
  return parts;
}

}  // namespace

bool Graph::has_isolated_nodes() const {
  for (int i = 0; i < num_nodes(); ++i)
    if (neighbor_count(i) == 0) return true;
  return false;
}

std::vector<WeightedEdge> Graph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(static_cast<std::size_t>(num_edges()));
  for (int i = 0; i < num_nodes(); ++i)
    for (SpMatRow::InnerIterator it(adj_, i); it; ++it)
      if (it.col() > i) out.push_back({i, static_cast<int>(it.col()), it.value()});
  return out;
}

Graph build_graph(const std::vector<WeightedEdge>& edge_list, std::optional<int> num_nodes) {
  int n = num_nodes.value_or(0);
  if (num_nodes && n < 0) throw std::invalid_argument("build_graph: negative node count");

  int dropped = 0;
  std::vector<WeightedEdge> half;
  half.reserve(edge_list.size());
  for (const auto& e : edge_list) {
    if (e.u < 0 || e.v < 0) throw std::invalid_argument("build_graph: negative node id");
    if (num_nodes && (e.u >= n || e.v >= n))
      throw std::invalid_argument("build_graph: node id " + std::to_string(std::max(e.u, e.v)) +
                                  " outside declared node count " + std::to_string(n));
    if (!std::isfinite(e.w) || !(e.w > 0.0))
      throw std::invalid_argument("build_graph: edge (" + std::to_string(e.u) + ", " +
                                  std::to_string(e.v) + ") has non-positive or non-finite weight");
    if (e.u == e.v) {
      ++dropped;
      continue;
    }
    half.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.w});
    if (!num_nodes) n = std::max(n, std::max(e.u, e.v) + 1);
  }
  // setFromTriplets sums duplicates, which is exactly the multigraph-collapse
  // semantics wanted here.
  AssembledParts parts = assemble(n, half);
  Graph g;
  g.adj_ = std::move(parts.adj);
  g.degrees_ = std::move(parts.degrees);
  g.self_loops_dropped = dropped;
  return g;
}

Graph graph_from_adjacency(const SpMat& a, double prune_tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("graph_from_adjacency: matrix not square");
  double amax = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) amax = std::max(amax, std::abs(it.value()));

  int dropped = 0;
  std::vector<WeightedEdge> half;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      const int i = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      if (i == j) {
        if (it.value() != 0.0) ++dropped;
        continue;
      }
      if (i > j) continue;  // each unordered pair once, seen from the upper triangle
      const double w = it.value();
      const double wt = a.coeff(j, i);
      if (std::abs(w - wt) > 1e-12 * std::max(1.0, amax))
        throw std::invalid_argument("graph_from_adjacency: matrix not symmetric at (" +
                                    std::to_string(i) + ", " + std::to_string(j) + ")");
      if (w == 0.0 || std::abs(w) <= prune_tol) continue;
      if (w < 0.0)
        throw std::invalid_argument("graph_from_adjacency: negative weight at (" +
                                    std::to_string(i) + ", " + std::to_string(j) + ")");
      half.push_back({i, j, w});
    }
  }
  AssembledParts parts = assemble(static_cast<int>(a.rows()), half);
  Graph g;
  g.adj_ = std::move(parts.adj);
  g.degrees_ = std::move(parts.degrees);
  g.self_loops_dropped = dropped;
  return g;
}

LaplacianMatrix laplacian(const Graph& g, LaplacianKind kind) {
  const int n = g.num_nodes();
  const auto& adj = g.adjacency();

  if (kind == LaplacianKind::normalized && g.has_isolated_nodes())
    throw ComputeError("laplacian: normalized form undefined on a graph with isolated nodes");

  LaplacianMatrix l;
  l.kind = kind;
  l.degrees = g.degrees();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(adj.nonZeros() + n);
  for (int i = 0; i < n; ++i) {
    const double di = g.degree(i);
    for (SpMatRow::InnerIterator it(adj, i); it; ++it) {
      const int j = static_cast<int>(it.col());
      if (kind == LaplacianKind::combinatorial)
        trips.emplace_back(i, j, -it.value());
      else
        trips.emplace_back(i, j, -it.value() / std::sqrt(di * g.degree(j)));
    }
    if (kind == LaplacianKind::combinatorial)
      trips.emplace_back(i, i, di);
    else if (g.neighbor_count(i) > 0)
      trips.emplace_back(i, i, 1.0);
  }
  SpMat m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  l.matrix = std::move(m);
  return l;
}

IncidenceMatrix incidence(const Graph& g) {
  const auto edge_list = g.edges();
  IncidenceMatrix b;
  b.edge_order.reserve(edge_list.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(edge_list.size() * 2);
  int col = 0;
  for (const auto& e : edge_list) {
    const double s = std::sqrt(e.w);
    trips.emplace_back(e.u, col, -s);  // negative end at the smaller id
    trips.emplace_back(e.v, col, s);
    b.edge_order.emplace_back(e.u, e.v);
    ++col;
  }
  SpMat m(g.num_nodes(), col);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  b.matrix = std::move(m);
  return b;
}

double quadratic_form(const LaplacianMatrix& l, const Eigen::VectorXd& x) {
  if (x.size() != l.matrix.rows())
    throw std::invalid_argument("quadratic_form: vector length " + std::to_string(x.size()) +
                                " does not match matrix size " + std::to_string(l.matrix.rows()));
  return x.dot(l.matrix * x);
}

Components connected_components(const Graph& g) {
  const int n = g.num_nodes();
  Components c;
  c.label.assign(n, -1);
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (c.label[s] >= 0) continue;
    const int id = c.count++;
    c.label[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (SpMatRow::InnerIterator it(g.adjacency(), u); it; ++it) {
        const int v = static_cast<int>(it.col());
        if (c.label[v] < 0) {
          c.label[v] = id;
          stack.push_back(v);
        }
      }
    }
  }
  return c;
}

bool is_valid_laplacian(const Eigen::MatrixXd& m, double rowsum_tol, double offdiag_tol) {
  if (m.rows() != m.cols()) return false;
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = m(i, j);
      if (std::abs(v - m(j, i)) > offdiag_tol) return false;
      if (i != j && v > offdiag_tol) return false;
      row_sum += v;
    }
    if (std::abs(row_sum) > rowsum_tol) return false;
  }
  return true;
}

bool is_valid_laplacian(const SpMat& m, double rowsum_tol, double offdiag_tol) {
  if (m.rows() != m.cols()) return false;
  Eigen::VectorXd row_sums = m * Eigen::VectorXd::Ones(m.cols());
  if (row_sums.lpNorm<Eigen::Infinity>() > rowsum_tol) return false;
  SpMat d = SpMat(m.transpose()) - m;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it)
      if (std::abs(it.value()) > offdiag_tol) return false;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      if (it.row() != it.col() && it.value() > offdiag_tol) return false;
  return true;
}

}  // namespace grc
