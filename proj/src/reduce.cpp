#include "grc/reduce.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "grc/rng.hpp"

namespace grc {

SpMat ReducedLaplacian::to_sparse() const {
  if (!dense_storage) return sparse;
  return dense.sparseView();
}

std::vector<int> maximal_independent_set(const Graph& g, std::uint64_t seed) {
  const int n = g.num_nodes();
  SplitMix64 rng(seed);
  const std::vector<int> order = random_permutation(n, rng);
  std::vector<char> blocked(n, 0);
  std::vector<int> s;
  for (const int i : order) {
    if (blocked[i]) continue;
    s.push_back(i);
    blocked[i] = 1;
    for (SpMatRow::InnerIterator it(g.adjacency(), i); it; ++it) blocked[it.col()] = 1;
  }
  std::sort(s.begin(), s.end());
  return s;
}

namespace {

std::vector<int> checked_sorted_subset(const Graph& g, std::vector<int> s, const char* who) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.empty()) throw std::invalid_argument(std::string(who) + ": empty node set");
  if (s.front() < 0 || s.back() >= g.num_nodes())
    throw std::invalid_argument(std::string(who) + ": node id outside the graph");
  return s;
}

// Cleanup shared by both elimination methods: clamp roundoff-sized
// off-diagonal entries to zero, reject genuinely positive ones, and recompute
// the diagonal as the negated off-diagonal row sum so row sums are exactly
// zero. Returns the coarse graph plus the stored Laplacian.
std::pair<Graph, ReducedLaplacian> finish_reduction(const Eigen::MatrixXd& s,
                                                    std::vector<int> retained,
                                                    ReductionMethod method) {
  const int nc = static_cast<int>(s.rows());
  double smax = 0.0;
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) smax = std::max(smax, std::abs(s(i, j)));
  const double clamp = 1e-12 * smax;

  std::vector<Eigen::Triplet<double>> lap_trips;
  std::vector<WeightedEdge> edge_list;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(nc);
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < nc; ++j) {
      if (i == j) continue;
      const double v = s(i, j);
      if (std::abs(v) <= clamp) continue;
      if (v > 0.0)
        throw ComputeError("reduction produced a positive off-diagonal entry (" +
                           std::to_string(v) + "); input is too ill-conditioned");
      lap_trips.emplace_back(i, j, v);
      diag[i] -= v;
      if (i < j) edge_list.push_back({i, j, -v});
    }
  }
  for (int i = 0; i < nc; ++i) lap_trips.emplace_back(i, i, diag[i]);

  Graph gc = build_graph(edge_list, nc);
  gc.node_ids = retained;

  ReducedLaplacian red;
  red.retained = std::move(retained);
  red.method = method;
  const double density =
      nc == 0 ? 0.0 : static_cast<double>(lap_trips.size()) / (static_cast<double>(nc) * nc);
  red.dense_storage = density > 0.25;
  if (red.dense_storage) {
    red.dense = Eigen::MatrixXd::Zero(nc, nc);
    for (const auto& t : lap_trips) red.dense(t.row(), t.col()) = t.value();
  } else {
    red.sparse.resize(nc, nc);
    red.sparse.setFromTriplets(lap_trips.begin(), lap_trips.end());
    red.sparse.makeCompressed();
  }
  return {std::move(gc), std::move(red)};
}

}  // namespace

std::pair<Graph, ReducedLaplacian> indset_coarsen(const Graph& g, const std::vector<int>& s_in) {
  const int n = g.num_nodes();
  const std::vector<int> s = checked_sorted_subset(g, s_in, "indset_coarsen");
  const int nc = static_cast<int>(s.size());

  std::vector<int> member_idx(n, -1);
  for (int k = 0; k < nc; ++k) member_idx[s[k]] = k;

  for (const int v : s)
    for (SpMatRow::InnerIterator it(g.adjacency(), v); it; ++it)
      if (member_idx[it.col()] >= 0)
        throw std::invalid_argument("indset_coarsen: set is not independent, edge (" +
                                    std::to_string(v) + ", " + std::to_string(it.col()) +
                                    ") joins two members");

  // D_f(y) = total weight from outside node y into the set. Maximality of
  // the set is exactly what keeps every entry positive.
  Eigen::VectorXd d_f = Eigen::VectorXd::Zero(n);
  for (int y = 0; y < n; ++y) {
    if (member_idx[y] >= 0) continue;
    for (SpMatRow::InnerIterator it(g.adjacency(), y); it; ++it)
      if (member_idx[it.col()] >= 0) d_f[y] += it.value();
    if (d_f[y] == 0.0)
      throw ComputeError("indset_coarsen: node " + std::to_string(y) +
                         " has no neighbor in the set; the set is not maximal");
  }

  // Schur complement with the diagonal outside block: D_c - F D_f^{-1} F^T,
  // assembled one outside node at a time (its member neighbors form a clique
  // in the result — the F F^T sparsity pattern).
  Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(nc, nc);
  for (int k = 0; k < nc; ++k) schur(k, k) = g.degree(s[k]);
  std::vector<std::pair<int, double>> star;
  for (int y = 0; y < n; ++y) {
    if (member_idx[y] >= 0) continue;
    star.clear();
    for (SpMatRow::InnerIterator it(g.adjacency(), y); it; ++it)
      if (member_idx[it.col()] >= 0) star.emplace_back(member_idx[it.col()], it.value());
    for (const auto& [a, wa] : star)
      for (const auto& [b, wb] : star) schur(a, b) -= wa * wb / d_f[y];
  }
  return finish_reduction(schur, s, ReductionMethod::indset_diag_schur);
}

std::pair<Graph, ReducedLaplacian> kron_reduce(const Graph& g, const std::vector<int>& retained_in) {
  const int n = g.num_nodes();
  const std::vector<int> retained = checked_sorted_subset(g, retained_in, "kron_reduce");
  const int n1 = static_cast<int>(retained.size());
  const int n2 = n - n1;

  const Components comp = connected_components(g);
  std::vector<char> covered(comp.count, 0);
  for (const int v : retained) covered[comp.label[v]] = 1;
  for (int c = 0; c < comp.count; ++c) {
    if (covered[c]) continue;
    int size = 0;
    for (int i = 0; i < n; ++i) size += comp.label[i] == c;
    throw ComputeError("kron_reduce: component " + std::to_string(c) + " (" +
                       std::to_string(size) +
                       " nodes) contains no retained node; its block is singular");
  }

  std::vector<int> pos(n, -1);  // position within the retained / eliminated ordering
  for (int k = 0; k < n1; ++k) pos[retained[k]] = k;
  std::vector<int> eliminated;
  eliminated.reserve(n2);
  for (int i = 0; i < n; ++i)
    if (pos[i] < 0) {
      pos[i] = static_cast<int>(eliminated.size());
      eliminated.push_back(i);
    }

  const LaplacianMatrix l = laplacian(g);
  std::vector<char> is_ret(n, 0);
  for (const int v : retained) is_ret[v] = 1;

  std::vector<Eigen::Triplet<double>> t11, t12, t22;
  for (int k = 0; k < l.matrix.outerSize(); ++k) {
    for (SpMat::InnerIterator it(l.matrix, k); it; ++it) {
      const int i = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      if (is_ret[i] && is_ret[j])
        t11.emplace_back(pos[i], pos[j], it.value());
      else if (is_ret[i] && !is_ret[j])
        t12.emplace_back(pos[i], pos[j], it.value());
      else if (!is_ret[i] && !is_ret[j])
        t22.emplace_back(pos[i], pos[j], it.value());
    }
  }
  Eigen::MatrixXd schur;
  if (n2 == 0) {
    schur = Eigen::MatrixXd::Zero(n1, n1);
    for (const auto& t : t11) schur(t.row(), t.col()) += t.value();
  } else {
    SpMat l12(n1, n2);
    l12.setFromTriplets(t12.begin(), t12.end());
    Eigen::MatrixXd x;  // L22^{-1} L21
    if (n2 <= 2048) {
      Eigen::MatrixXd l22 = Eigen::MatrixXd::Zero(n2, n2);
      for (const auto& t : t22) l22(t.row(), t.col()) += t.value();
      Eigen::LLT<Eigen::MatrixXd> llt(l22);
      if (llt.info() != Eigen::Success)
        throw ComputeError("kron_reduce: eliminated block is not positive definite");
      x = llt.solve(Eigen::MatrixXd(l12.transpose()));
    } else {
      SpMat l22(n2, n2);
      l22.setFromTriplets(t22.begin(), t22.end());
      Eigen::SimplicialLDLT<SpMat> ldlt(l22);
      if (ldlt.info() != Eigen::Success)
        throw ComputeError("kron_reduce: factorization of the eliminated block failed");
      x = ldlt.solve(Eigen::MatrixXd(l12.transpose()));
    }
    schur = Eigen::MatrixXd::Zero(n1, n1);
    for (const auto& t : t11) schur(t.row(), t.col()) += t.value();
    schur -= l12 * x;
  }
  return finish_reduction(schur, retained, ReductionMethod::kron_schur);
}

std::vector<int> spectral_downsample(const Graph& g, LaplacianKind kind, const EigsOptions& opts) {
  return polarity_partition(g, kind, opts).plus;
}

CoarseMap coarse_map_from_members(const Graph& g, const std::vector<int>& members_in) {
  const std::vector<int> members = checked_sorted_subset(g, members_in, "coarse_map_from_members");
  const int n = g.num_nodes();
  std::vector<int> member_idx(n, -1);
  for (std::size_t k = 0; k < members.size(); ++k) member_idx[members[k]] = static_cast<int>(k);

  CoarseMap map;
  map.parent.assign(n, 0);
  map.tags.assign(n, NodeTag::leftover_singleton);
  map.n_c = static_cast<int>(members.size());
  for (const int v : members) {
    map.parent[v] = member_idx[v] + 1;
    map.tags[v] = NodeTag::real_singleton;
  }
  for (int y = 0; y < n; ++y) {
    if (map.parent[y] != 0) continue;
    int best = -1;
    double best_w = 0.0;
    for (SpMatRow::InnerIterator it(g.adjacency(), y); it; ++it) {
      if (member_idx[it.col()] >= 0 && it.value() > best_w) {
        best_w = it.value();
        best = static_cast<int>(it.col());
      }
    }
    if (best < 0)
      throw ComputeError("coarse_map_from_members: node " + std::to_string(y) +
                         " has no neighbor in the set");
    map.parent[y] = member_idx[best] + 1;
  }
  return map;
}

CoarseMap coarse_map_from_retained(const Graph& g, const std::vector<int>& retained_in) {
  const std::vector<int> retained = checked_sorted_subset(g, retained_in, "coarse_map_from_retained");
  const int n = g.num_nodes();

  CoarseMap map;
  map.parent.assign(n, 0);
  map.tags.assign(n, NodeTag::leftover_singleton);
  map.n_c = static_cast<int>(retained.size());

  // Multi-source BFS, sources pushed in ascending id order: each node joins
  // the retained node closest by hop count, with distance ties resolved by
  // the deterministic queue order.
  std::deque<int> queue;
  for (std::size_t k = 0; k < retained.size(); ++k) {
    map.parent[retained[k]] = static_cast<int>(k) + 1;
    map.tags[retained[k]] = NodeTag::real_singleton;
    queue.push_back(retained[k]);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (SpMatRow::InnerIterator it(g.adjacency(), u); it; ++it) {
      const int v = static_cast<int>(it.col());
      if (map.parent[v] == 0) {
        map.parent[v] = map.parent[u];
        queue.push_back(v);
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (map.parent[i] == 0)
      throw ComputeError("coarse_map_from_retained: node " + std::to_string(i) +
                         " is unreachable from the retained set");
  return map;
}

}  // namespace grc
