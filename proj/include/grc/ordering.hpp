#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "grc/graph.hpp"

namespace grc {

// Relative edge weights of a general square sparse matrix: each off-diagonal
// nonzero a_ij is scored against the average magnitudes of its row and
// column, w_ij = min(|a_ij|/delta_r(i), |a_ij|/delta_c(j)), where delta_r(i)
// is the 1-norm of row i divided by its nonzero count (diagonal included).
struct OrderingWeights {
  std::vector<Eigen::Triplet<double>> w;  // one entry per off-diagonal nonzero
  Eigen::VectorXd delta_row;
  Eigen::VectorXd delta_col;
};

OrderingWeights edge_weights(const SpMat& m);

// Pivot quality per index: sigma_k = |a_kk| / (delta_r(k) * delta_c(k)).
// Rows/columns with no nonzeros get sigma 0 (never favored as pivots).
Eigen::VectorXd pivot_impacts(const SpMat& m);

// Nested two-block ordering. Each level scans off-diagonal entries by
// decreasing weight; the first time an entry with both endpoints undecided
// is seen, the endpoint with larger pivot impact goes to the coarse block C
// and the other to F. Unvisited nodes fall to F. The procedure recurses on
// the F-submatrix (weights recomputed there) until the level budget is
// spent, C comes out empty, or F does.
struct BlockOrdering {
  std::vector<int> permutation;        // position -> original index
  std::vector<int> level_block_sizes;  // |C_0|, ..., |C_{d-1}|, |F_final|
  int levels_requested = 0;
  int levels_achieved = 0;
};

BlockOrdering coarsen_order(const SpMat& m, int levels);

}  // namespace grc
