#include "grc/coarsen_match.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "grc/rng.hpp"

namespace grc {

std::vector<std::vector<int>> CoarseMap::groups() const {
  std::vector<std::vector<int>> out(n_c);
  for (int i = 0; i < num_fine(); ++i) out[parent[i] - 1].push_back(i);
  return out;
}

void validate_coarse_map(const CoarseMap& map) {
  if (map.n_c < 0 || (map.num_fine() > 0 && map.n_c < 1))
    throw std::invalid_argument("coarse map: empty group set for a nonempty graph");
  std::vector<char> seen(map.n_c, 0);
  for (int i = 0; i < map.num_fine(); ++i) {
    const int p = map.parent[i];
    if (p < 1 || p > map.n_c)
      throw std::invalid_argument("coarse map: node " + std::to_string(i) + " has parent " +
                                  std::to_string(p) + " outside 1.." + std::to_string(map.n_c));
    seen[p - 1] = 1;
  }
  for (int k = 0; k < map.n_c; ++k)
    if (!seen[k])
      throw std::invalid_argument("coarse map: group " + std::to_string(k + 1) + " is empty");
  if (map.tags.size() != map.parent.size())
    throw std::invalid_argument("coarse map: tag list size mismatch");
}

namespace {

// Heaviest neighbor of i (ties: lowest neighbor id). Row iteration is in
// ascending column order, so a strict comparison implements the tie rule.
int heaviest_neighbor(const Graph& g, int i) {
  int best = -1;
  double best_w = 0.0;
  for (SpMatRow::InnerIterator it(g.adjacency(), i); it; ++it) {
    if (it.value() > best_w) {
      best_w = it.value();
      best = static_cast<int>(it.col());
    }
  }
  return best;
}

// Shared greedy matcher: scan edges in the given order, pair endpoints that
// are both still unassigned. Afterward no edge joins two unassigned nodes,
// so every leftover either is isolated (and becomes its own coarse node) or
// has only assigned neighbors and joins its heaviest neighbor's group.
CoarseMap greedy_matching(const Graph& g, const std::vector<WeightedEdge>& edges,
                          const std::vector<int>& order) {
  const int n = g.num_nodes();
  CoarseMap map;
  map.parent.assign(n, 0);
  map.tags.assign(n, NodeTag::matched);
  int next = 0;
  for (const int e : order) {
    const int u = edges[e].u, v = edges[e].v;
    if (map.parent[u] == 0 && map.parent[v] == 0) {
      ++next;
      map.parent[u] = map.parent[v] = next;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (map.parent[i] != 0) continue;
    if (g.neighbor_count(i) == 0) {
      ++next;
      map.parent[i] = next;
      map.tags[i] = NodeTag::real_singleton;
    } else {
      map.parent[i] = map.parent[heaviest_neighbor(g, i)];
      map.tags[i] = NodeTag::leftover_singleton;
    }
  }
  map.n_c = next;
  return map;
}

}  // namespace

CoarseMap hem(const Graph& g) {
  const auto edges = g.edges();
  std::vector<int> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (edges[a].w != edges[b].w) return edges[a].w > edges[b].w;  // heavy first
    if (edges[a].u != edges[b].u) return edges[a].u < edges[b].u;
    return edges[a].v < edges[b].v;
  });
  return greedy_matching(g, edges, order);
}

LeverageScores leverage_scores(const Graph& g, const LeverageOptions& opts) {
  const int n = g.num_nodes();
  if (n == 0) throw std::invalid_argument("leverage_scores: empty graph");
  if (opts.tau < 0.0) throw std::invalid_argument("leverage_scores: negative decay temperature");

  const bool pinv_like =
      opts.variant == LeverageVariant::pinv || opts.variant == LeverageVariant::pinv_truncated;
  const bool full_spectrum =
      opts.variant == LeverageVariant::full_decay || opts.variant == LeverageVariant::pinv;

  int r = full_spectrum ? n : (opts.rank > 0 ? opts.rank : std::min(n - 1, 40));
  if (r < 1 || r > n)
    throw std::invalid_argument("leverage_scores: rank " + std::to_string(r) +
                                " outside 1.." + std::to_string(n));
  if (pinv_like) {
    const Components c = connected_components(g);
    if (c.count != 1)
      throw ComputeError("leverage_scores: pseudoinverse variants need a connected graph, found " +
                         std::to_string(c.count) + " components");
  }

  const EigenBasis basis = eigs(laplacian(g, opts.kind), r, SpectrumEnd::smallest, opts.eigs);

  LeverageScores out;
  out.variant = opts.variant;
  out.rank = r;
  out.tau = opts.tau;
  out.eta = Eigen::VectorXd::Zero(n);
  // Connected graph: exactly one zero eigenvalue, in column 0, which the
  // pseudoinverse sums skip.
  const int first = pinv_like ? 1 : 0;
  for (int k = first; k < r; ++k) {
    const double lambda = basis.values[k];
    const double coef = pinv_like ? 1.0 / lambda : std::exp(-2.0 * opts.tau * lambda);
    out.eta += coef * basis.vectors.col(k).cwiseAbs2();
  }
  return out;
}

CoarseMap lesc(const Graph& g, const LeverageScores& scores, int n_c_target, std::uint64_t seed,
               const LescOptions& opts) {
  const int n = g.num_nodes();
  if (scores.eta.size() != n)
    throw std::invalid_argument("lesc: score vector length does not match the graph");
  if (n_c_target < 1) throw std::invalid_argument("lesc: target coarse size must be positive");

  // "Most important first": low pseudoinverse scores are important hubs, high
  // decay scores are important spectral mass. Ties: lowest id.
  bool ascending;
  switch (opts.direction) {
    case LescDirection::ascending: ascending = true; break;
    case LescDirection::descending: ascending = false; break;
    default:
      ascending = scores.variant == LeverageVariant::pinv ||
                  scores.variant == LeverageVariant::pinv_truncated;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ascending ? scores.eta[a] < scores.eta[b] : scores.eta[a] > scores.eta[b];
  });

  CoarseMap map;
  map.parent.assign(n, 0);
  map.tags.assign(n, NodeTag::matched);
  int next = 0;
  std::vector<int> singles;
  for (const int i : order) {
    if (map.parent[i] != 0) continue;
    if (g.neighbor_count(i) == 0) {
      ++next;
      map.parent[i] = next;
      map.tags[i] = NodeTag::real_singleton;
      continue;
    }
    // Heaviest edge to a still-unassigned neighbor; one match per visit.
    int best = -1;
    double best_w = 0.0;
    for (SpMatRow::InnerIterator it(g.adjacency(), i); it; ++it) {
      if (map.parent[it.col()] == 0 && it.value() > best_w) {
        best_w = it.value();
        best = static_cast<int>(it.col());
      }
    }
    if (best >= 0) {
      ++next;
      map.parent[i] = map.parent[best] = next;
    } else {
      singles.push_back(i);
    }
  }

  // No two nodes in `singles` are adjacent (either would have matched the
  // other), so attachment targets below are always already assigned.
  SplitMix64 rng(seed);
  deterministic_shuffle(singles, rng);
  const int promote = std::max(0, std::min<int>(static_cast<int>(singles.size()),
                                                n_c_target - next));
  for (int s = 0; s < static_cast<int>(singles.size()); ++s) {
    const int i = singles[s];
    if (s < promote) {
      ++next;
      map.parent[i] = next;
      map.tags[i] = NodeTag::real_singleton;
    } else {
      map.parent[i] = map.parent[heaviest_neighbor(g, i)];
      map.tags[i] = NodeTag::leftover_singleton;
    }
  }
  map.n_c = next;
  return map;
}

AlgebraicDistances algebraic_distances(const Graph& g, std::uint64_t seed,
                                       const AlgdistOptions& opts) {
  if (!(opts.omega > 0.0 && opts.omega < 1.0))
    throw std::invalid_argument("algebraic_distances: omega must lie strictly in (0, 1)");
  if (opts.steps < 1) throw std::invalid_argument("algebraic_distances: need at least one step");
  if (g.has_isolated_nodes())
    throw ComputeError("algebraic_distances: isolated nodes make D singular");

  const int n = g.num_nodes();
  Eigen::VectorXd x;
  if (opts.start) {
    if (opts.start->size() != n)
      throw std::invalid_argument("algebraic_distances: start vector length mismatch");
    x = *opts.start;
  } else {
    x.resize(n);
    SplitMix64 rng(seed);
    for (int i = 0; i < n; ++i) x[i] = rng.next_double(-0.5, 0.5);
  }

  const std::vector<WeightedEdge> edges = g.edges();
  const Eigen::VectorXd inv_deg = g.degrees().cwiseInverse();
  // Residual form of the damped Jacobi sweep, x <- x + omega D^{-1}(A - D)x,
  // accumulated edge by edge. Any constant vector is then a bitwise fixed
  // point (every term w (x_j - x_i) is exactly zero), which the row-normalized
  // update x <- (1-omega)x + omega D^{-1}Ax misses by rounding rows unevenly.
  Eigen::VectorXd r(n);
  for (int step = 0; step < opts.steps; ++step) {
    r.setZero();
    for (const WeightedEdge& e : edges) {
      const double t = e.w * (x[e.v] - x[e.u]);
      r[e.u] += t;
      r[e.v] -= t;
    }
    x += opts.omega * inv_deg.cwiseProduct(r);
  }

  AlgebraicDistances out;
  out.edges = edges;
  out.omega = opts.omega;
  out.steps = opts.steps;
  out.distance.resize(static_cast<long>(out.edges.size()));
  for (std::size_t e = 0; e < out.edges.size(); ++e)
    out.distance[static_cast<long>(e)] = std::abs(x[out.edges[e].u] - x[out.edges[e].v]);

  if (opts.scale_by_lambda2 && n >= 2) {
    // Eigenvalues of the iteration matrix H through its symmetric similar
    // form: 1 - omega * lambda_hat over the normalized Laplacian spectrum.
    // Largest modulus is always 1 (constant mode); the runner-up decides the
    // decay rate of the nonconstant part.
    const LaplacianMatrix ln = laplacian(g, LaplacianKind::normalized);
    const EigenBasis bottom = eigs(ln, 2, SpectrumEnd::smallest, opts.eigs);
    const EigenBasis top = eigs(ln, 1, SpectrumEnd::largest, opts.eigs);
    const double mu2 = std::max(std::abs(1.0 - opts.omega * bottom.values[1]),
                                std::abs(1.0 - opts.omega * top.values[0]));
    out.lambda2 = mu2;
    const double scale = std::pow(mu2, opts.steps);
    if (scale > 1e-300) {
      out.distance /= scale;
      out.lambda2_scaled = true;
    }
  }
  return out;
}

CoarseMap algdist_matching(const Graph& g, const AlgebraicDistances& d) {
  const auto edges = g.edges();
  if (edges.size() != d.edges.size())
    throw std::invalid_argument("algdist_matching: distances belong to a different graph");
  std::vector<int> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (d.distance[a] != d.distance[b]) return d.distance[a] < d.distance[b];  // close first
    if (edges[a].u != edges[b].u) return edges[a].u < edges[b].u;
    return edges[a].v < edges[b].v;
  });
  return greedy_matching(g, edges, order);
}

}  // namespace grc
