#include "grc/eigensolve.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "grc/rng.hpp"

namespace grc {

namespace {

double true_residual(const SpMat& m, const Eigen::VectorXd& values,
                     const Eigen::MatrixXd& vectors) {
  double res = 0.0;
  for (int k = 0; k < values.size(); ++k)
    res = std::max(res, (m * vectors.col(k) - values[k] * vectors.col(k)).norm());
  return res;
}

EigenBasis dense_eigs(const SpMat& m, int r, SpectrumEnd end) {
  const int n = static_cast<int>(m.rows());
  const Eigen::MatrixXd dense(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success)
    throw ComputeError("eigs: dense eigendecomposition failed");
  const int off = (end == SpectrumEnd::smallest) ? 0 : n - r;
  EigenBasis out;
  out.values = es.eigenvalues().segment(off, r);
  out.vectors = es.eigenvectors().middleCols(off, r);
  out.residual = true_residual(m, out.values, out.vectors);
  return out;
}

// Random unit vector orthogonal to the first `cols` columns of v. Used for
// the start vector and to continue past an invariant subspace.
Eigen::VectorXd fresh_direction(const Eigen::MatrixXd& v, int cols, SplitMix64& rng) {
  const int n = static_cast<int>(v.rows());
  Eigen::VectorXd w(n);
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (int i = 0; i < n; ++i) w[i] = rng.next_double(-0.5, 0.5);
    if (cols > 0) {
      w -= v.leftCols(cols) * (v.leftCols(cols).transpose() * w);
      w -= v.leftCols(cols) * (v.leftCols(cols).transpose() * w);
    }
    const double nrm = w.norm();
    if (nrm > 1e-8) return w / nrm;
  }
  throw ComputeError("eigs: could not generate a direction outside the current subspace");
}

// Thick-restart Lanczos with full reorthogonalization. The projected matrix
// T = V^T M V is kept as a small dense symmetric matrix, which makes the
// restart bookkeeping trivial: after a restart the retained Ritz pairs form
// a diagonal block and the next expansion step fills in the couplings simply
// by orthogonalizing M v against the whole basis.
EigenBasis lanczos_eigs(const SpMat& m, int r, SpectrumEnd end, const EigsOptions& opts) {
  const int n = static_cast<int>(m.rows());
  const int mb = std::min<long>(n, opts.basis_size > 0 ? std::max(opts.basis_size, r + 2)
                                                       : std::max(2 * r + 20, 60));
  const int max_restarts = opts.max_restarts > 0 ? opts.max_restarts : 50 * r;
  const int keep = std::min(mb - 2, r + std::min(r, 20));  // wanted pairs + buffer

  SplitMix64 rng(opts.seed ^ 0x5851f42d4c957f2dULL);
  Eigen::MatrixXd v(n, mb);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(mb, mb);
  v.col(0) = fresh_direction(v, 0, rng);

  int p = 0;              // columns of v already seeded for this cycle
  int start = 0;          // first column still to be expanded
  double best_res = std::numeric_limits<double>::infinity();
  EigenBasis out;

  for (int cycle = 0; cycle <= max_restarts; ++cycle) {
    // Expand the basis to mb columns, orthogonalizing twice against
    // everything kept so far (full reorthogonalization).
    double beta_last = 0.0;
    Eigen::VectorXd f;
    for (p = start; p < mb; ++p) {
      Eigen::VectorXd w = m * v.col(p);
      Eigen::VectorXd h = v.leftCols(p + 1).transpose() * w;
      w -= v.leftCols(p + 1) * h;
      const Eigen::VectorXd h2 = v.leftCols(p + 1).transpose() * w;
      w -= v.leftCols(p + 1) * h2;
      h += h2;
      t.col(p).head(p + 1) = h;
      t.row(p).head(p + 1) = h.transpose();
      const double beta = w.norm();
      if (p + 1 < mb) {
        if (beta < 1e-13) {
          v.col(p + 1) = fresh_direction(v, p + 1, rng);
          t(p + 1, p) = t(p, p + 1) = 0.0;
        } else {
          v.col(p + 1) = w / beta;
          t(p + 1, p) = t(p, p + 1) = beta;
        }
      } else {
        f = w;
        beta_last = beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.topLeftCorner(mb, mb));
    if (es.info() != Eigen::Success) throw ComputeError("eigs: projected solve failed");
    const int off = (end == SpectrumEnd::smallest) ? 0 : mb - r;

    // Cheap residual estimates |beta * s_mb| decide whether to pay for the
    // exact check.
    double est = 0.0;
    for (int k = 0; k < r; ++k)
      est = std::max(est, std::abs(beta_last * es.eigenvectors()(mb - 1, off + k)));
    best_res = std::min(best_res, est);
    if (est <= opts.tol || cycle == max_restarts) {
      Eigen::MatrixXd x = v * es.eigenvectors().middleCols(off, r);
      // Ritz vectors of a near-complete basis can lose orthonormality in the
      // last digits; a thin re-normalization keeps the contract honest.
      for (int k = 0; k < r; ++k) {
        for (int j = 0; j < k; ++j) x.col(k) -= x.col(j) * (x.col(j).dot(x.col(k)));
        x.col(k) /= x.col(k).norm();
      }
      Eigen::VectorXd vals(r);
      for (int k = 0; k < r; ++k) vals[k] = x.col(k).dot(m * x.col(k));
      const double exact = true_residual(m, vals, x);
      best_res = std::min(best_res, exact);
      if (exact <= opts.tol) {
        // Rayleigh quotients of near-degenerate pairs can land out of order
        // by rounding; return strictly ascending.
        std::vector<int> idx(r);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return vals[a] < vals[b]; });
        out.values.resize(r);
        out.vectors.resize(n, r);
        for (int k = 0; k < r; ++k) {
          out.values[k] = vals[idx[k]];
          out.vectors.col(k) = x.col(idx[k]);
        }
        out.residual = exact;
        out.restarts = cycle;
        return out;
      }
      if (cycle == max_restarts)
        throw EigsConvergenceError(
            "eigs: no convergence after " + std::to_string(max_restarts) +
                " restarts (best residual " + std::to_string(best_res) + ")",
            best_res);
    }

    // Thick restart: keep the wanted end of the Ritz spectrum plus a buffer,
    // then continue the expansion from the residual direction.
    const int koff = (end == SpectrumEnd::smallest) ? 0 : mb - keep;
    Eigen::MatrixXd kept = v * es.eigenvectors().middleCols(koff, keep);
    v.leftCols(keep) = kept;
    t.setZero();
    t.topLeftCorner(keep, keep) = es.eigenvalues().segment(koff, keep).asDiagonal();
    if (beta_last < 1e-13)
      v.col(keep) = fresh_direction(v, keep, rng);
    else
      v.col(keep) = f / beta_last;
    start = keep;
  }
  throw EigsConvergenceError("eigs: restart loop exhausted", best_res);
}

}  // namespace

EigenBasis eigs(const SpMat& m, int r, SpectrumEnd end, const EigsOptions& opts) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigs: matrix not square");
  const int n = static_cast<int>(m.rows());
  if (r < 1 || r > n)
    throw std::invalid_argument("eigs: requested " + std::to_string(r) + " pairs from size " +
                                std::to_string(n));
  const bool dense = opts.solver == SolverChoice::dense ||
                     (opts.solver == SolverChoice::automatic && n <= opts.dense_threshold);
  return dense ? dense_eigs(m, r, end) : lanczos_eigs(m, r, end, opts);
}

EigenBasis eigs(const LaplacianMatrix& l, int r, SpectrumEnd end, const EigsOptions& opts) {
  return eigs(l.matrix, r, end, opts);
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  int best = 0;
  double best_abs = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best_abs) {  // strict: ties keep the lowest index
      best_abs = a;
      best = i;
    }
  }
  if (v.size() > 0 && v[best] < 0.0) v = -v;
}

namespace {

Bipartition partition_by_sign(const Eigen::VectorXd& vec, double value) {
  Bipartition b;
  b.vector = vec;
  fix_sign(b.vector);
  b.value = value;
  for (int i = 0; i < b.vector.size(); ++i) {
    // Entries within 1e-12 of zero count as plus.
    if (b.vector[i] >= -1e-12)
      b.plus.push_back(i);
    else
      b.minus.push_back(i);
  }
  return b;
}

}  // namespace

Bipartition fiedler_bipartition(const Graph& g, const EigsOptions& opts) {
  if (g.num_nodes() < 2)
    throw std::invalid_argument("fiedler_bipartition: need at least two nodes");
  const Components c = connected_components(g);
  if (c.count != 1)
    throw ComputeError("fiedler_bipartition: graph must be connected, found " +
                       std::to_string(c.count) + " components");
  const EigenBasis basis = eigs(laplacian(g), 2, SpectrumEnd::smallest, opts);
  return partition_by_sign(basis.vectors.col(1), basis.values[1]);
}

Bipartition polarity_partition(const Graph& g, LaplacianKind kind, const EigsOptions& opts) {
  if (g.num_nodes() < 1) throw std::invalid_argument("polarity_partition: empty graph");
  if (g.has_isolated_nodes())
    throw ComputeError("polarity_partition: graph has isolated nodes");
  const EigenBasis basis = eigs(laplacian(g, kind), 1, SpectrumEnd::largest, opts);
  return partition_by_sign(basis.vectors.col(0), basis.values[0]);
}

}  // namespace grc
