#pragma once

#include <Eigen/Dense>

#include "grc/coarsen_match.hpp"
#include "grc/graph.hpp"

namespace grc {

enum class InterpVariant { binary_c, uniform_p, spectral_p };

// Fine-to-coarse transfer operator, n x n_c (or n x m*k for the multi-vector
// spectral variant). Carries the partition it was built from.
struct InterpolationOp {
  SpMat matrix;
  InterpVariant variant = InterpVariant::binary_c;
  CoarseMap map;

  int fine_size() const { return static_cast<int>(matrix.rows()); }
  int coarse_size() const { return static_cast<int>(matrix.cols()); }
};

// Binary aggregation matrix: C_ik = 1 iff node i is in group k. For any
// Laplacian L, C^T L C is again a Laplacian.
InterpolationOp build_c(const CoarseMap& map);

// Row-normalized variant: P_ik = 1/|S_k| on group k's rows, so C^T P = I
// (P^T is the pseudoinverse of C^T) and P^T 1 = 1.
InterpolationOp build_uniform_p(const CoarseMap& map);

struct GalerkinOptions {
  // Adjacency convention: zero the diagonal of P^T M P afterward, so the
  // result is again an adjacency (group-internal weight is discarded).
  bool adjacency = false;
  // Replace every surviving nonzero with 1 (the convention used when the
  // operator has real-valued spectral entries and signed products are
  // meaningless as weights).
  bool binarize = false;
};

// The coarse matrix P^T M P. Exact zeros created by cancellation are pruned.
SpMat galerkin_coarse(const SpMat& m, const InterpolationOp& p, const GalerkinOptions& opts = {});

// The lifted matrix P L_c P^T, same size as the fine problem. With the
// uniform variant, P C^T is a projector, so lifting a Galerkin coarse
// Laplacian is idempotent.
SpMat lift(const SpMat& coarse, const InterpolationOp& p);

// One column per group, carrying the restriction of u to the group,
// normalized: P = blockdiag(u_1/||u_1||, ..., u_k/||u_k||). Then P P^T u = u
// and P^T P = I — the coarse problem reproduces (u, lambda) exactly as a
// Ritz pair. A group where u vanishes identically cannot be normalized and
// is an error (the message names the group).
InterpolationOp preserve_one(const Graph& g, const Eigen::VectorXd& u, const CoarseMap& partition);

struct PreserveManyOptions {
  // Orthonormalize each block by QR (default) or by the symmetric polar
  // factor; both span the same space, polar stays closest to the original
  // block in Frobenius norm.
  bool polar = false;
};

// Multi-vector generalization: for U with m columns, each group's block U_i
// is orthonormalized (U_i = P_i R_i), giving m columns per group and a coarse
// space of m * k dimensions that reproduces all of span(U)'s Ritz pairs. A
// rank-deficient block (rank < m) is an error naming the group; groups must
// have at least m rows. ||U_i||_F = ||R_i||_F per block by construction.
InterpolationOp preserve_many(const Graph& g, const Eigen::MatrixXd& u,
                              const CoarseMap& partition, const PreserveManyOptions& opts = {});

// Default partition for the spectral variants: nodes sorted by decreasing
// weighted degree (ties: lowest id) and cut into k contiguous chunks of
// near-equal size (the first n mod k chunks get the extra node).
CoarseMap default_preserve_partition(const Graph& g, int k);

}  // namespace grc
