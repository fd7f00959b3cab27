#pragma once

// Deterministic graph generators for the tests. Everything is a pure
// function of its arguments (seeded through SplitMix64), so failures
// reproduce exactly.

#include <algorithm>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "grc/graph.hpp"
#include "grc/rng.hpp"

namespace testgen {

inline grc::Graph path(int n, double w = 1.0) {
  std::vector<grc::WeightedEdge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, w});
  return grc::build_graph(e, n);
}

inline grc::Graph cycle(int n, double w = 1.0) {
  std::vector<grc::WeightedEdge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, w});
  if (n > 2) e.push_back({0, n - 1, w});
  return grc::build_graph(e, n);
}

inline grc::Graph complete(int n, double w = 1.0) {
  std::vector<grc::WeightedEdge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j, w});
  return grc::build_graph(e, n);
}

// Star with node 0 in the center and `leaves` leaves.
inline grc::Graph star(int leaves, double w = 1.0) {
  std::vector<grc::WeightedEdge> e;
  for (int i = 1; i <= leaves; ++i) e.push_back({0, i, w});
  return grc::build_graph(e, leaves + 1);
}

inline grc::Graph grid(int rows, int cols, double w = 1.0) {
  std::vector<grc::WeightedEdge> e;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.push_back({id(r, c), id(r, c + 1), w});
      if (r + 1 < rows) e.push_back({id(r, c), id(r + 1, c), w});
    }
  return grc::build_graph(e, rows * cols);
}

// Connected: a random spanning tree (each node links to a random earlier
// one) plus `extra` random non-tree, non-duplicate edges. Weights uniform
// in [wlo, whi).
inline grc::Graph random_connected(int n, int extra, std::uint64_t seed, double wlo = 0.5,
                                   double whi = 2.0) {
  grc::SplitMix64 rng(seed);
  std::vector<grc::WeightedEdge> e;
  std::set<std::pair<int, int>> seen;
  for (int v = 1; v < n; ++v) {
    const int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(v)));
    e.push_back({u, v, rng.next_double(wlo, whi)});
    seen.insert({u, v});
  }
  int placed = 0;
  int attempts = 0;
  while (placed < extra && attempts < 50 * (extra + 1)) {
    ++attempts;
    int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) continue;
    e.push_back({u, v, rng.next_double(wlo, whi)});
    ++placed;
  }
  return grc::build_graph(e, n);
}

// Possibly disconnected: `m` distinct random edges on n nodes (isolated
// nodes allowed).
inline grc::Graph random_graph(int n, int m, std::uint64_t seed, double wlo = 0.5,
                               double whi = 2.0) {
  grc::SplitMix64 rng(seed);
  std::vector<grc::WeightedEdge> e;
  std::set<std::pair<int, int>> seen;
  int placed = 0;
  int attempts = 0;
  while (placed < m && attempts < 50 * (m + 1)) {
    ++attempts;
    int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) continue;
    e.push_back({u, v, rng.next_double(wlo, whi)});
    ++placed;
  }
  return grc::build_graph(e, n);
}

// Like random_graph but every isolated node gets attached to a random other
// node afterwards, so degree > 0 everywhere.
inline grc::Graph random_no_isolated(int n, int m, std::uint64_t seed, double wlo = 0.5,
                                     double whi = 2.0) {
  grc::SplitMix64 rng(seed);
  grc::Graph g = random_graph(n, m, rng.next(), wlo, whi);
  std::vector<grc::WeightedEdge> e = g.edges();
  bool patched = false;
  for (int i = 0; i < n; ++i) {
    if (g.neighbor_count(i) > 0) continue;
    int other = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
    if (other >= i) ++other;
    e.push_back({std::min(i, other), std::max(i, other), rng.next_double(wlo, whi)});
    patched = true;
  }
  return patched ? grc::build_graph(e, n) : g;
}

// Large sparse graph for timing runs: a spanning tree plus uniformly sampled
// extra edges, duplicates collapsing by weight sum (exact edge count is not
// important for a benchmark, the scale is).
inline grc::Graph random_perf_graph(int n, std::int64_t m, std::uint64_t seed) {
  grc::SplitMix64 rng(seed);
  std::vector<grc::WeightedEdge> e;
  e.reserve(static_cast<std::size_t>(m));
  for (int v = 1; v < n; ++v) {
    const int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(v)));
    e.push_back({u, v, rng.next_double(0.5, 2.0)});
  }
  for (std::int64_t k = n - 1; k < m; ++k) {
    int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (u == v) continue;
    e.push_back({std::min(u, v), std::max(u, v), rng.next_double(0.5, 2.0)});
  }
  return grc::build_graph(e, n);
}

}  // namespace testgen
