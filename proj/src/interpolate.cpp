#include "grc/interpolate.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace grc {

InterpolationOp build_c(const CoarseMap& map) {
  validate_coarse_map(map);
  const int n = map.num_fine();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n);
  for (int i = 0; i < n; ++i) trips.emplace_back(i, map.parent[i] - 1, 1.0);
  InterpolationOp op;
  op.variant = InterpVariant::binary_c;
  op.map = map;
  op.matrix.resize(n, map.n_c);
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  op.matrix.makeCompressed();
  return op;
}

InterpolationOp build_uniform_p(const CoarseMap& map) {
  validate_coarse_map(map);
  const int n = map.num_fine();
  std::vector<int> size(map.n_c, 0);
  for (int i = 0; i < n; ++i) ++size[map.parent[i] - 1];
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n);
  for (int i = 0; i < n; ++i)
    trips.emplace_back(i, map.parent[i] - 1, 1.0 / size[map.parent[i] - 1]);
  InterpolationOp op;
  op.variant = InterpVariant::uniform_p;
  op.map = map;
  op.matrix.resize(n, map.n_c);
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  op.matrix.makeCompressed();
  return op;
}

SpMat galerkin_coarse(const SpMat& m, const InterpolationOp& p, const GalerkinOptions& opts) {
  if (m.rows() != m.cols() || m.rows() != p.matrix.rows())
    throw std::invalid_argument("galerkin_coarse: matrix size does not match the operator");
  SpMat out = SpMat(p.matrix.transpose()) * m * p.matrix;
  if (opts.adjacency) {
    for (int k = 0; k < out.outerSize(); ++k)
      for (SpMat::InnerIterator it(out, k); it; ++it)
        if (it.row() == it.col()) it.valueRef() = 0.0;
  }
  if (opts.binarize) {
    for (int k = 0; k < out.outerSize(); ++k)
      for (SpMat::InnerIterator it(out, k); it; ++it)
        if (it.value() != 0.0) it.valueRef() = 1.0;
  }
  out.prune([](int, int, double v) { return v != 0.0; });
  return out;
}

SpMat lift(const SpMat& coarse, const InterpolationOp& p) {
  if (coarse.rows() != coarse.cols() || coarse.rows() != p.matrix.cols())
    throw std::invalid_argument("lift: coarse matrix size does not match the operator");
  SpMat out = p.matrix * coarse * SpMat(p.matrix.transpose());
  out.prune([](int, int, double v) { return v != 0.0; });
  return out;
}

InterpolationOp preserve_one(const Graph& g, const Eigen::VectorXd& u, const CoarseMap& partition) {
  validate_coarse_map(partition);
  const int n = g.num_nodes();
  if (partition.num_fine() != n || u.size() != n)
    throw std::invalid_argument("preserve_one: vector/partition size does not match the graph");

  std::vector<double> norm2(partition.n_c, 0.0);
  for (int i = 0; i < n; ++i) norm2[partition.parent[i] - 1] += u[i] * u[i];
  for (int k = 0; k < partition.n_c; ++k)
    if (norm2[k] == 0.0)
      throw ComputeError("preserve_one: the vector vanishes on group " + std::to_string(k + 1) +
                         "; its column cannot be normalized");

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int k = partition.parent[i] - 1;
    if (u[i] != 0.0) trips.emplace_back(i, k, u[i] / std::sqrt(norm2[k]));
  }
  InterpolationOp op;
  op.variant = InterpVariant::spectral_p;
  op.map = partition;
  op.matrix.resize(n, partition.n_c);
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  op.matrix.makeCompressed();
  return op;
}

InterpolationOp preserve_many(const Graph& g, const Eigen::MatrixXd& u, const CoarseMap& partition,
                              const PreserveManyOptions& opts) {
  validate_coarse_map(partition);
  const int n = g.num_nodes();
  const int m = static_cast<int>(u.cols());
  if (partition.num_fine() != n || u.rows() != n)
    throw std::invalid_argument("preserve_many: matrix/partition size does not match the graph");
  if (m < 1) throw std::invalid_argument("preserve_many: need at least one column");

  const auto groups = partition.groups();
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < partition.n_c; ++k) {
    const auto& members = groups[k];
    const int rows = static_cast<int>(members.size());
    if (rows < m)
      throw ComputeError("preserve_many: group " + std::to_string(k + 1) + " has " +
                         std::to_string(rows) + " nodes, fewer than the " + std::to_string(m) +
                         " vectors to preserve");
    Eigen::MatrixXd block(rows, m);
    for (int r = 0; r < rows; ++r) block.row(r) = u.row(members[r]);

    Eigen::MatrixXd q;
    if (opts.polar) {
      // Symmetric polar factor: block = W S V^T gives the orthonormal W V^T,
      // the closest orthonormal frame to the block itself.
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (svd.singularValues()(m - 1) <= 1e-10 * std::max(1.0, svd.singularValues()(0)))
        throw ComputeError("preserve_many: group " + std::to_string(k + 1) +
                           " block is rank deficient");
      q = svd.matrixU() * svd.matrixV().transpose();
    } else {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(block);
      rank_check.setThreshold(1e-10);
      if (rank_check.rank() < m)
        throw ComputeError("preserve_many: group " + std::to_string(k + 1) +
                           " block has rank " + std::to_string(rank_check.rank()) +
                           ", expected " + std::to_string(m));
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(block);
      q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, m);
    }
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < m; ++c)
        if (q(r, c) != 0.0) trips.emplace_back(members[r], k * m + c, q(r, c));
  }

  InterpolationOp op;
  op.variant = InterpVariant::spectral_p;
  op.map = partition;
  op.matrix.resize(n, partition.n_c * m);
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  op.matrix.makeCompressed();
  return op;
}

CoarseMap default_preserve_partition(const Graph& g, int k) {
  const int n = g.num_nodes();
  if (k < 1 || k > n)
    throw std::invalid_argument("default_preserve_partition: group count " + std::to_string(k) +
                                " outside 1.." + std::to_string(n));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return g.degree(a) > g.degree(b); });

  CoarseMap map;
  map.parent.assign(n, 0);
  map.tags.assign(n, NodeTag::matched);
  map.n_c = k;
  const int base = n / k, extra = n % k;
  int at = 0;
  for (int grp = 0; grp < k; ++grp) {
    const int sz = base + (grp < extra ? 1 : 0);
    for (int s = 0; s < sz; ++s) map.parent[order[at++]] = grp + 1;
  }
  return map;
}

}  // namespace grc
