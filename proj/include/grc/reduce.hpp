#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "grc/coarsen_match.hpp"
#include "grc/eigensolve.hpp"
#include "grc/graph.hpp"

namespace grc {

// Greedy maximal independent set over a seeded random node permutation.
// Returned ascending. Maximal by construction: every excluded node saw a
// neighbor enter the set first.
std::vector<int> maximal_independent_set(const Graph& g, std::uint64_t seed);

enum class ReductionMethod { indset_diag_schur, kron_schur };

// Coarse Laplacian produced by eliminating non-retained nodes. Stored dense
// when the result is dense enough that sparse storage only adds overhead
// (above 25% fill), sparse otherwise.
struct ReducedLaplacian {
  bool dense_storage = false;
  Eigen::MatrixXd dense;
  SpMat sparse;
  std::vector<int> retained;  // fine ids, ascending; row k <-> retained[k]
  ReductionMethod method = ReductionMethod::kron_schur;

  int size() const {
    return dense_storage ? static_cast<int>(dense.rows()) : static_cast<int>(sparse.rows());
  }
  Eigen::MatrixXd to_dense() const { return dense_storage ? dense : Eigen::MatrixXd(sparse); }
  SpMat to_sparse() const;
};

// Independent-set coarsening: with S independent, the fine Laplacian in
// (S, rest) block order has a diagonal lower-right block D_f, and the Schur
// complement D_c - F D_f^{-1} F^T is itself a Laplacian whose sparsity is
// that of F F^T. Requires S independent (error otherwise) and every
// non-member adjacent to S — guaranteed when S is maximal; a zero D_f entry
// names the offending node. The returned graph's node_ids record the fine id
// of each coarse node.
std::pair<Graph, ReducedLaplacian> indset_coarsen(const Graph& g, const std::vector<int>& s);

// Kron reduction: Schur complement of the full Laplacian onto the retained
// set. Every connected component must contain a retained node (otherwise the
// eliminated block is singular; the error names the component). Effective
// resistances between retained nodes are preserved exactly.
std::pair<Graph, ReducedLaplacian> kron_reduce(const Graph& g, const std::vector<int>& retained);

// Retained set from spectral polarity: the plus side of the sign split of
// the top eigenvector. Proper nonempty subset on any connected graph with
// at least one edge.
std::vector<int> spectral_downsample(const Graph& g,
                                     LaplacianKind kind = LaplacianKind::normalized,
                                     const EigsOptions& opts = {});

// Fine-to-coarse provenance maps for the elimination methods, so reduction
// levels compose with the interpolation machinery. Members map to
// themselves. For an independent set, each outside node attaches to its
// heaviest member neighbor (maximality makes one exist; ties: lowest id).
CoarseMap coarse_map_from_members(const Graph& g, const std::vector<int>& members);

// For a general retained set, non-retained nodes attach to the nearest
// retained node by unweighted multi-source BFS (sources seeded in ascending
// id order, so distance ties resolve deterministically).
CoarseMap coarse_map_from_retained(const Graph& g, const std::vector<int>& retained);

}  // namespace grc
