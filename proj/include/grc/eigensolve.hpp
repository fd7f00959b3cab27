#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "grc/errors.hpp"
#include "grc/graph.hpp"

namespace grc {

// Partial symmetric eigendecomposition. `values` are ascending regardless of
// which end of the spectrum was requested; column k of `vectors` pairs with
// values[k]. `residual` is the achieved max ||M u - lambda u||_2 over the
// returned pairs (exactly measured, not an estimate).
struct EigenBasis {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  double residual = 0.0;
  int restarts = 0;  // Lanczos restart cycles spent (0 on the dense path)
};

enum class SpectrumEnd { smallest, largest };
enum class SolverChoice { automatic, dense, lanczos };

struct EigsOptions {
  double tol = 1e-8;
  std::uint64_t seed = 0;
  SolverChoice solver = SolverChoice::automatic;
  int dense_threshold = 512;  // automatic: dense at or below, Lanczos above
  int max_restarts = 0;       // 0 means 50 * r
  int basis_size = 0;         // 0 means automatic
};

struct EigsConvergenceError : ComputeError {
  EigsConvergenceError(const std::string& msg, double best)
      : ComputeError(msg), best_residual(best) {}
  double best_residual;
};

// r extreme eigenpairs of a symmetric matrix. Small problems are handled by
// a dense solver; large ones by thick-restart Lanczos with full
// reorthogonalization and a seeded start, so results are deterministic for a
// fixed seed. Throws EigsConvergenceError when the restart budget runs out.
EigenBasis eigs(const SpMat& m, int r, SpectrumEnd end, const EigsOptions& opts = {});
EigenBasis eigs(const LaplacianMatrix& l, int r, SpectrumEnd end, const EigsOptions& opts = {});

// Sign convention for eigenvectors that drive partitions: flip so the entry
// of largest magnitude is positive (ties: lowest index wins).
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

// A two-sided split of the node set by eigenvector sign. Entries within
// 1e-12 of zero land on the plus side.
struct Bipartition {
  std::vector<int> plus;
  std::vector<int> minus;
  Eigen::VectorXd vector;  // defining eigenvector, sign-fixed
  double value = 0.0;      // its eigenvalue
};

// Split by the sign of the second-smallest eigenvector of the combinatorial
// Laplacian. Requires a connected graph; the error names the component count.
Bipartition fiedler_bipartition(const Graph& g, const EigsOptions& opts = {});

// Split by the sign of the largest eigenvector of the chosen Laplacian form.
// Requires a graph without isolated nodes. On such graphs every node whose
// eigenvector entry is nonzero has a neighbor of opposite polarity, which is
// what makes the plus set a covering downsample.
Bipartition polarity_partition(const Graph& g, LaplacianKind kind, const EigsOptions& opts = {});

}  // namespace grc
