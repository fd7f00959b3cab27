#include "grc/quality.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "grc/errors.hpp"
#include "grc/rng.hpp"

namespace grc {

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& sym, double rank_tol) {
  if (sym.rows() != sym.cols()) throw std::invalid_argument("pseudo_inverse: matrix not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sym + sym.transpose()));
  if (es.info() != Eigen::Success) throw ComputeError("pseudo_inverse: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lmax = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  const double tol = rank_tol >= 0.0
                         ? rank_tol
                         : static_cast<double>(sym.rows()) *
                               std::numeric_limits<double>::epsilon() * std::max(lmax, 1e-300);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] > tol) inv[i] = 1.0 / ev[i];
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

ResistanceSolver::ResistanceSolver(const Graph& g) : n_(g.num_nodes()) {
  const Components c = connected_components(g);
  if (c.count != 1)
    throw ComputeError("effective resistance needs a connected graph, found " +
                       std::to_string(c.count) + " components");
  if (n_ < 2) throw std::invalid_argument("effective resistance needs at least two nodes");
  // Ground node 0: delete its row/column and the remaining block is positive
  // definite, so one sparse factorization answers every pair.
  const LaplacianMatrix l = laplacian(g);
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < l.matrix.outerSize(); ++k)
    for (SpMat::InnerIterator it(l.matrix, k); it; ++it)
      if (it.row() != ground_ && it.col() != ground_)
        trips.emplace_back(static_cast<int>(it.row()) - 1, static_cast<int>(it.col()) - 1,
                           it.value());
  SpMat grounded(n_ - 1, n_ - 1);
  grounded.setFromTriplets(trips.begin(), trips.end());
  solver_.compute(grounded);
  if (solver_.info() != Eigen::Success)
    throw ComputeError("effective resistance: factorization of the grounded Laplacian failed");
}

double ResistanceSolver::resistance(int a, int b) const {
  if (a < 0 || a >= n_ || b < 0 || b >= n_)
    throw std::invalid_argument("effective resistance: node out of range");
  if (a == b) return 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_ - 1);
  if (a != ground_) rhs[a - 1] += 1.0;
  if (b != ground_) rhs[b - 1] -= 1.0;
  const Eigen::VectorXd x = solver_.solve(rhs);
  const double xa = a == ground_ ? 0.0 : x[a - 1];
  const double xb = b == ground_ ? 0.0 : x[b - 1];
  return xa - xb;
}

namespace {

struct RestrictedPencil {
  Eigen::MatrixXd a;  // fine form on the common range
  Eigen::MatrixXd b;  // lifted/coarse form on the common range
  int dim = 0;
};

Eigen::MatrixXd range_basis(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sym + sym.transpose()));
  if (es.info() != Eigen::Success) throw ComputeError("sigma_similarity: eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lmax = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  const double tol =
      static_cast<double>(sym.rows()) * std::numeric_limits<double>::epsilon() * lmax;
  int rank = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] > tol) ++rank;
  return es.eigenvectors().rightCols(rank);
}

// Both quadratic forms restricted to the intersection of their ranges.
// A lifted coarse Laplacian annihilates everything the transfer operator
// cannot represent, so comparing forms on the full deflated space would read
// infinity for any nontrivial coarsening; the intersection (computed by
// principal angles between the two range bases) is where the comparison is
// meaningful. Empty intersection gives dim 0.
RestrictedPencil restrict_to_common_range(const Eigen::MatrixXd& l,
                                          const Eigen::MatrixXd& l_tilde) {
  if (l.rows() != l.cols() || l_tilde.rows() != l_tilde.cols() || l.rows() != l_tilde.rows())
    throw std::invalid_argument("sigma_similarity: matrices must be square and of equal size");
  const Eigen::MatrixXd u1 = range_basis(l);
  const Eigen::MatrixXd u2 = range_basis(l_tilde);
  RestrictedPencil out;
  if (u1.cols() == 0 || u2.cols() == 0) return out;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(u1.transpose() * u2,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  int common = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] >= 1.0 - 1e-8) ++common;
  if (common == 0) return out;

  const Eigen::MatrixXd q = u1 * svd.matrixU().leftCols(common);
  out.a = q.transpose() * l * q;
  out.b = q.transpose() * l_tilde * q;
  out.a = 0.5 * (out.a + out.a.transpose());
  out.b = 0.5 * (out.b + out.b.transpose());
  out.dim = common;
  return out;
}

}  // namespace

double sigma_similarity(const Eigen::MatrixXd& l, const Eigen::MatrixXd& l_tilde) {
  const RestrictedPencil p = restrict_to_common_range(l, l_tilde);
  if (p.dim == 0) {
    // Degenerate comparison; also covers two zero forms, which are identical.
    const bool both_zero = l.cwiseAbs().maxCoeff() == 0.0 && l_tilde.cwiseAbs().maxCoeff() == 0.0;
    return both_zero ? 1.0 : std::numeric_limits<double>::infinity();
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(p.a, p.b);
  if (ges.info() != Eigen::Success)
    throw ComputeError("sigma_similarity: generalized eigensolver failed");
  const double mu_min = ges.eigenvalues()[0];
  const double mu_max = ges.eigenvalues()[p.dim - 1];
  if (!(mu_min > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(1.0, std::max(mu_max, 1.0 / mu_min));
}

SandwichReport eig_sandwich_check(const Eigen::MatrixXd& l, const Eigen::MatrixXd& l_tilde,
                                  double sigma, double tol) {
  const RestrictedPencil p = restrict_to_common_range(l, l_tilde);
  SandwichReport rep;
  rep.sigma = sigma;
  rep.subspace_dim = p.dim;
  if (p.dim == 0) return rep;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(p.a), eb(p.b);
  if (ea.info() != Eigen::Success || eb.info() != Eigen::Success)
    throw ComputeError("eig_sandwich_check: eigensolver failed");
  for (int k = 0; k < p.dim; ++k) {
    EigPairRow row;
    row.k = k + 1;
    row.lambda = ea.eigenvalues()[k];
    row.lambda_t = eb.eigenvalues()[k];
    row.lower_slack = row.lambda_t / sigma - row.lambda;
    row.upper_slack = row.lambda - sigma * row.lambda_t;
    row.ok = row.lower_slack <= tol && row.upper_slack <= tol;
    rep.max_violation =
        std::max(rep.max_violation, std::max(row.lower_slack, row.upper_slack));
    rep.rows.push_back(row);
  }
  rep.max_violation = std::max(rep.max_violation, 0.0);
  return rep;
}

ResistanceReport resistance_error(const Graph& g, const Graph& g_c,
                                  const std::vector<int>& retained, int sample,
                                  std::uint64_t seed) {
  const int nc = g_c.num_nodes();
  if (static_cast<int>(retained.size()) != nc)
    throw std::invalid_argument(
        "resistance_error: retained list length must equal the coarse node count");
  for (const int v : retained)
    if (v < 0 || v >= g.num_nodes())
      throw std::invalid_argument("resistance_error: retained id outside the fine graph");
  if (nc < 2) throw std::invalid_argument("resistance_error: need at least two retained nodes");

  const ResistanceSolver fine(g), coarse(g_c);

  const std::int64_t total = static_cast<std::int64_t>(nc) * (nc - 1) / 2;
  std::vector<std::int64_t> chosen;
  if (sample <= 0 || sample >= total) {
    chosen.resize(static_cast<std::size_t>(total));
    for (std::int64_t i = 0; i < total; ++i) chosen[static_cast<std::size_t>(i)] = i;
  } else {
    // Seeded sample of distinct pair indices.
    SplitMix64 rng(seed);
    std::set<std::int64_t> picked;
    while (static_cast<int>(picked.size()) < sample)
      picked.insert(static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(total))));
    chosen.assign(picked.begin(), picked.end());
  }

  ResistanceReport rep;
  rep.pairs = static_cast<int>(chosen.size());
  double sum = 0.0;
  for (const std::int64_t idx : chosen) {
    // Decode pair index -> (k, l), k < l, row-major over the strict upper triangle.
    std::int64_t run = idx;
    int k = 0;
    while (run >= nc - 1 - k) {
      run -= nc - 1 - k;
      ++k;
    }
    const int lcol = k + 1 + static_cast<int>(run);
    const double rf = fine.resistance(retained[k], retained[lcol]);
    const double rc = coarse.resistance(k, lcol);
    const double rel = std::abs(rf - rc) / rf;
    rep.max_rel_err = std::max(rep.max_rel_err, rel);
    sum += rel;
  }
  rep.mean_rel_err = rep.pairs > 0 ? sum / rep.pairs : 0.0;
  return rep;
}

PinvBoundResult delta_pinv_bound_check(const Graph& g, int i, int j) {
  const int n = g.num_nodes();
  if (i < 0 || i >= n || j < 0 || j >= n || i == j)
    throw std::invalid_argument("delta_pinv_bound_check: invalid node pair");
  const double w = g.edge_weight(i, j);
  if (w == 0.0)
    throw std::invalid_argument("delta_pinv_bound_check: (" + std::to_string(i) + ", " +
                                std::to_string(j) + ") is not an edge");
  const Components c = connected_components(g);
  if (c.count != 1)
    throw ComputeError("delta_pinv_bound_check: graph must be connected, found " +
                       std::to_string(c.count) + " components");

  const Eigen::MatrixXd l = Eigen::MatrixXd(laplacian(g).matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
  if (es.info() != Eigen::Success)
    throw ComputeError("delta_pinv_bound_check: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lmax = ev[n - 1];
  const double tol = n * std::numeric_limits<double>::epsilon() * lmax;
  // Connected graph: one zero eigenvalue; the next one up sets the effective
  // condition number kappa = lambda_max / lambda_2.
  const double lmin = ev[1];
  if (!(lmin > tol))
    throw ComputeError("delta_pinv_bound_check: numerically singular Laplacian");
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
  for (int k = 1; k < n; ++k) inv[k] = 1.0 / ev[k];
  const Eigen::MatrixXd pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  const double s = std::sqrt(w);
  b[std::min(i, j)] = -s;
  b[std::max(i, j)] = s;

  const Eigen::VectorXd pb = pinv * b;
  PinvBoundResult out;
  out.lhs = pb.squaredNorm() / b.dot(pb);
  out.rhs = (lmax / lmin) * (pinv(i, i) + pinv(j, j));
  // The bound is exactly tight on a two-node graph, hence the relative slack.
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

namespace {

nlohmann::json json_number_or_marker(double v) {
  // JSON has no infinity; the distinguished value serializes as a string.
  if (std::isinf(v)) return "infinity";
  return v;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::json quality_report_to_json(const QualityReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& row : r.sandwich.rows) pairs.push_back({row.lambda, row.lambda_t});
  nlohmann::json j = {{"format", "quality-report"},
                      {"sigma", json_number_or_marker(r.sigma)},
                      {"sigma_squared", json_number_or_marker(r.sigma_squared)},
                      {"subspace_dim", r.sandwich.subspace_dim},
                      {"eig_order", "ascending"},
                      {"max_eig_violation", r.sandwich.max_violation},
                      {"eig_pairs", std::move(pairs)},
                      {"notes", r.notes}};
  if (r.resistance) {
    j["resistance"] = {{"max_rel_err", r.resistance->max_rel_err},
                       {"mean_rel_err", r.resistance->mean_rel_err},
                       {"pairs", r.resistance->pairs}};
  } else {
    j["resistance"] = nullptr;
  }
  return j;
}

std::string eig_table_csv(const SandwichReport& r) {
  std::ostringstream out;
  out << "k,lambda,lambda_lifted,lower_slack,upper_slack,ok\n";
  for (const auto& row : r.rows)
    out << row.k << "," << fmt_double(row.lambda) << "," << fmt_double(row.lambda_t) << ","
        << fmt_double(row.lower_slack) << "," << fmt_double(row.upper_slack) << ","
        << (row.ok ? 1 : 0) << "\n";
  return out.str();
}

}  // namespace grc
