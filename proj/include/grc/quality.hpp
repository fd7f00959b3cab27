#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grc/graph.hpp"

namespace grc {

// Moore-Penrose pseudoinverse of a symmetric PSD matrix via
// eigendecomposition; eigenvalues below rank_tol (default n*eps*lambda_max)
// are treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& sym, double rank_tol = -1.0);

// Effective resistance between two nodes of a connected graph, computed by a
// grounded (one row/column deleted) sparse Cholesky solve, so it scales past
// the dense-pseudoinverse regime. Factorizes once, answers many pairs.
class ResistanceSolver {
 public:
  explicit ResistanceSolver(const Graph& g);
  double resistance(int a, int b) const;

 private:
  int n_ = 0;
  int ground_ = 0;
  Eigen::SimplicialLDLT<SpMat> solver_;
};

// Spectral similarity constant between two Laplacians of the same size:
// the smallest sigma >= 1 with (1/sigma) x^T Lt x <= x^T L x <= sigma x^T Lt x
// for all x in the common range of L and Lt. Lifted coarse Laplacians have a
// larger nullspace than the fine one, so the comparison restricts to the
// intersection of ranges (principal-angle construction); the restricted
// dimension and the convention are recorded in the quality report. Returns
// infinity when the common range is empty.
double sigma_similarity(const Eigen::MatrixXd& l, const Eigen::MatrixXd& l_tilde);

struct EigPairRow {
  int k = 0;             // 1-based position in the restricted ascending order
  double lambda = 0.0;   // fine form eigenvalue on the common range
  double lambda_t = 0.0; // coarse/lifted form eigenvalue
  double lower_slack = 0.0;  // lambda_t / sigma - lambda (positive = violated)
  double upper_slack = 0.0;  // lambda - sigma * lambda_t (positive = violated)
  bool ok = true;
};

struct SandwichReport {
  std::vector<EigPairRow> rows;
  double max_violation = 0.0;  // worst positive slack, 0 when all hold
  int subspace_dim = 0;
  double sigma = 1.0;
};

// Checks the two-sided eigenvalue bound lambda_t/sigma <= lambda <= sigma *
// lambda_t pairwise over the ascending restricted spectra, at tolerance tol.
SandwichReport eig_sandwich_check(const Eigen::MatrixXd& l, const Eigen::MatrixXd& l_tilde,
                                  double sigma, double tol = 1e-8);

struct ResistanceReport {
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  int pairs = 0;
};

// Relative effective-resistance error between fine pairs (a, b) of retained
// nodes and their coarse images. `sample` pairs are drawn with the seed;
// sample <= 0 or >= the pair count means every pair. Both graphs must be
// connected.
ResistanceReport resistance_error(const Graph& g, const Graph& g_c,
                                  const std::vector<int>& retained, int sample,
                                  std::uint64_t seed);

struct PinvBoundResult {
  double lhs = 0.0;  // ||Delta L^+||_F^2 for the rank-one edge update, exact form
  double rhs = 0.0;  // kappa(L) * (L^+_ii + L^+_jj)
  bool holds = false;
};

// Single-edge perturbation bound on the pseudoinverse: for edge e = (i, j),
// lhs = (b_e^T L^+ L^+ b_e) / (b_e^T L^+ b_e) and rhs = kappa(L) (L^+_ii +
// L^+_jj) with kappa the ratio of extreme nonzero eigenvalues. The bound can
// be exactly tight (two-node case), so `holds` allows a 1e-9 relative slack.
// Connected graphs only.
PinvBoundResult delta_pinv_bound_check(const Graph& g, int i, int j);

struct QualityReport {
  double sigma = std::numeric_limits<double>::infinity();
  double sigma_squared = std::numeric_limits<double>::infinity();  // preconditioning figure
  SandwichReport sandwich;
  std::optional<ResistanceReport> resistance;
  std::vector<std::string> notes;
};

nlohmann::json quality_report_to_json(const QualityReport& r);
// One CSV row per restricted eigenvalue pair: k, lambda, lambda_t, slacks.
std::string eig_table_csv(const SandwichReport& r);

}  // namespace grc
