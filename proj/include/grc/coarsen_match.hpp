#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "grc/eigensolve.hpp"
#include "grc/graph.hpp"

namespace grc {

// How a node ended up in its group.
enum class NodeTag : unsigned char {
  matched,             // paired across an edge
  real_singleton,      // became a coarse node on its own
  leftover_singleton,  // attached to an existing group after the main pass
};

// Surjective fine-to-coarse assignment. Parent ids run 1..n_c (matching the
// usual matching-pseudocode convention where 0 means "not yet assigned");
// coarse node k of the contracted graph corresponds to parent id k+1.
struct CoarseMap {
  std::vector<int> parent;
  int n_c = 0;
  std::vector<NodeTag> tags;

  int num_fine() const { return static_cast<int>(parent.size()); }
  // Members of each group, 0-based group index, members ascending.
  std::vector<std::vector<int>> groups() const;
};

// Throws std::invalid_argument unless every parent id lies in 1..n_c and
// every group is nonempty.
void validate_coarse_map(const CoarseMap& map);

// Heavy-edge matching: scan edges by decreasing weight (ties: lexicographic
// by endpoint pair) and pair still-unassigned endpoints. Isolated nodes
// become coarse nodes of their own; every other leftover node joins the
// group of its heaviest neighbor. Deterministic, no randomness involved.
CoarseMap hem(const Graph& g);

// Node-importance scores from the spectrum of the Laplacian.
enum class LeverageVariant { decay, full_decay, pinv, pinv_truncated };

struct LeverageOptions {
  LeverageVariant variant = LeverageVariant::pinv_truncated;
  int rank = 0;      // 0 means min(n - 1, 40); full_decay always uses n
  double tau = 0.5;  // decay temperature
  LaplacianKind kind = LaplacianKind::combinatorial;
  EigsOptions eigs;
};

struct LeverageScores {
  Eigen::VectorXd eta;
  LeverageVariant variant = LeverageVariant::pinv_truncated;
  int rank = 0;
  double tau = 0.0;
};

// decay:          eta_i = sum_{k<=r} (exp(-tau lambda_k) U_ik)^2
// full_decay:     same sum over the whole spectrum (r = n)
// pinv:           eta_i = sum_{j>=2} (U_ij / sqrt(lambda_j))^2 = (L^+)_ii
// pinv_truncated: the pinv sum cut at j = r
// The pinv variants need a connected graph (the zero eigenvalue is skipped
// once); disconnected input is an error.
LeverageScores leverage_scores(const Graph& g, const LeverageOptions& opts = {});

enum class LescDirection {
  automatic,  // ascending for pinv variants, descending for decay variants
  ascending,
  descending,
};

struct LescOptions {
  LescDirection direction = LescDirection::automatic;
};

// Leverage-score coarsening. Nodes are visited most-important-first; an
// unassigned node pairs with the unassigned neighbor across its heaviest
// edge. Nodes with no unassigned neighbor go to a singleton pool, which is
// shuffled (seeded); the first n_c_target - (groups so far) of them become
// coarse nodes and the rest attach to their heaviest neighbor's group. If
// the pairing pass alone already exceeds n_c_target, every singleton
// attaches; that is not an error. Isolated nodes always become their own
// coarse nodes.
CoarseMap lesc(const Graph& g, const LeverageScores& scores, int n_c_target,
               std::uint64_t seed, const LescOptions& opts = {});

struct AlgdistOptions {
  double omega = 0.5;  // Jacobi damping, must lie in (0, 1)
  int steps = 20;
  bool scale_by_lambda2 = false;  // divide by lambda_2(H)^k to stabilize
  // Iteration start; default is seeded uniform(-0.5, 0.5) entries.
  std::optional<Eigen::VectorXd> start;
  EigsOptions eigs;  // only used for the lambda_2 estimate
};

// Per-edge |x_i - x_j| after k damped-Jacobi smoothing steps
// x <- (1-omega) x + omega D^{-1} A x. Distances follow the canonical edge
// enumeration. lambda2 is the second-largest-modulus eigenvalue of the
// iteration matrix (computed through its symmetrized similar form); when
// scaling is requested but lambda2^k underflows, the raw distances are kept
// and lambda2_scaled stays false.
struct AlgebraicDistances {
  std::vector<WeightedEdge> edges;
  Eigen::VectorXd distance;
  double omega = 0.5;
  int steps = 0;
  bool lambda2_scaled = false;
  double lambda2 = 0.0;
};

AlgebraicDistances algebraic_distances(const Graph& g, std::uint64_t seed,
                                       const AlgdistOptions& opts = {});

// Matching over the same greedy skeleton as hem, but edges are scanned by
// increasing algebraic distance (algebraically close first). Singleton
// handling is identical to hem: heaviest-weight neighbor decides attachment.
CoarseMap algdist_matching(const Graph& g, const AlgebraicDistances& d);

}  // namespace grc
