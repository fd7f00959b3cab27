#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "grc/errors.hpp"
#include "grc/reduce.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace grc;

TEST_CASE("maximal independent set: independent, maximal, sorted, seeded") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Graph g = testgen::random_graph(50, 80, 100 + s);
    std::vector<int> mis = maximal_independent_set(g, s);
    CHECK(std::is_sorted(mis.begin(), mis.end()));
    std::vector<char> in(50, 0);
    for (int v : mis) in[v] = 1;
    for (int v : mis)
      for (SpMatRow::InnerIterator it(g.adjacency(), v); it; ++it)
        CHECK(!in[it.col()]);  // independence
    for (int i = 0; i < 50; ++i) {
      if (in[i]) continue;
      bool covered = false;
      for (SpMatRow::InnerIterator it(g.adjacency(), i); it; ++it)
        if (in[it.col()]) covered = true;
      CHECK(covered);  // maximality
    }
    CHECK(maximal_independent_set(g, s) == mis);
  }
  // isolated nodes always join the set
  Graph iso = build_graph({{0, 1, 1.0}}, 3);
  std::vector<int> mis = maximal_independent_set(iso, 0);
  CHECK(std::find(mis.begin(), mis.end(), 2) != mis.end());
}

TEST_CASE("independent-set reduction of a path, by hand") {
  auto [gc, red] = indset_coarsen(testgen::path(3), {0, 2});
  Eigen::MatrixXd want(2, 2);
  want << 0.5, -0.5, -0.5, 0.5;
  CHECK((red.to_dense() - want).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(gc.num_nodes() == 2);
  CHECK(gc.edge_weight(0, 1) == doctest::Approx(0.5));
  CHECK(gc.node_ids == std::vector<int>{0, 2});
  CHECK(red.method == ReductionMethod::indset_diag_schur);
}

TEST_CASE("star reduced on its leaves becomes a uniform clique") {
  auto [gc, red] = indset_coarsen(testgen::star(3), {1, 2, 3});
  CHECK(gc.num_nodes() == 3);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) CHECK(gc.edge_weight(a, b) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("independent-set reduction agrees with the dense reference") {
  for (std::uint64_t s = 0; s < 25; ++s) {
    Graph g = testgen::random_no_isolated(60, 110, 4000 + s);
    std::vector<int> mis = maximal_independent_set(g, s);
    auto [gc, red] = indset_coarsen(g, mis);
    Eigen::MatrixXd want =
        oracle::dense_indset_reduction(oracle::dense_laplacian(60, g.edges()), mis);
    CHECK((red.to_dense() - want).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(is_valid_laplacian(red.to_dense(), 1e-10, 1e-12));
  }
}

TEST_CASE("indset rejections") {
  Graph p = testgen::path(3);
  // {0, 1} is not independent
  CHECK_THROWS_AS(indset_coarsen(p, {0, 1}), std::invalid_argument);
  // {0} alone is independent but not maximal: node 2 has no member neighbor
  CHECK_THROWS_WITH_AS(indset_coarsen(p, {0}), doctest::Contains("not maximal"), ComputeError);
  CHECK_THROWS_AS(indset_coarsen(p, {0, 5}), std::invalid_argument);
  // unsorted input is normalized, not rejected
  auto [gc, red] = indset_coarsen(p, {2, 0});
  CHECK(red.retained == std::vector<int>{0, 2});
}

TEST_CASE("kron reduction of a path, by hand") {
  auto [gc, red] = kron_reduce(testgen::path(4), {0, 3});
  // three unit resistors in series leave conductance 1/3
  CHECK(gc.edge_weight(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(red.to_dense()(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(gc.node_ids == std::vector<int>{0, 3});
  CHECK(red.method == ReductionMethod::kron_schur);
}

TEST_CASE("kron reduction is the true schur complement") {
  for (std::uint64_t s = 0; s < 25; ++s) {
    Graph g = testgen::random_connected(50, 90, 5000 + s);
    SplitMix64 rng(s);
    std::vector<int> perm = random_permutation(50, rng);
    std::vector<int> keep(perm.begin(), perm.begin() + 20);
    std::sort(keep.begin(), keep.end());

    auto [gc, red] = kron_reduce(g, keep);
    Eigen::MatrixXd want = oracle::dense_schur(oracle::dense_laplacian(50, g.edges()), keep);
    CHECK((red.to_dense() - want).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(is_valid_laplacian(red.to_dense(), 1e-9, 1e-12));
  }
}

TEST_CASE("kron preserves retained effective resistances") {
  Graph g = testgen::random_connected(40, 70, 606);
  std::vector<int> keep = {1, 5, 9, 14, 22, 30, 38};
  auto [gc, red] = kron_reduce(g, keep);

  Eigen::MatrixXd pf = oracle::dense_pinv(oracle::dense_laplacian(40, g.edges()));
  Eigen::MatrixXd pc = oracle::dense_pinv(red.to_dense());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = a + 1; b < keep.size(); ++b) {
      const double rf = oracle::dense_resistance(pf, keep[a], keep[b]);
      const double rc = oracle::dense_resistance(pc, static_cast<int>(a), static_cast<int>(b));
      CHECK(rf == doctest::Approx(rc).epsilon(1e-9));
    }
}

TEST_CASE("kron needs a retained node in every component") {
  Graph two = build_graph({{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK_THROWS_WITH_AS(kron_reduce(two, {0}), doctest::Contains("component"), ComputeError);
  // covered components are fine even when disconnected
  auto [gc, red] = kron_reduce(two, {0, 2});
  CHECK(gc.num_nodes() == 2);
  CHECK(gc.num_edges() == 0);  // the two survivors live in different components
}

TEST_CASE("eliminating nothing returns the laplacian itself") {
  Graph g = testgen::random_connected(12, 20, 3);
  std::vector<int> all(12);
  for (int i = 0; i < 12; ++i) all[i] = i;
  auto [gc, red] = kron_reduce(g, all);
  CHECK((red.to_dense() - oracle::dense_laplacian(12, g.edges())).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("reduction storage switches on density") {
  // heavy elimination of a dense-ish graph produces a dense coarse matrix
  Graph dense_case = testgen::random_connected(30, 200, 12);
  auto [g1, r1] = kron_reduce(dense_case, {0, 1, 2, 3, 4});
  CHECK(r1.dense_storage);
  // trimming two path end nodes keeps everything sparse
  Graph sparse_case = testgen::path(100);
  std::vector<int> keep;
  for (int i = 1; i < 99; ++i) keep.push_back(i);
  auto [g2, r2] = kron_reduce(sparse_case, keep);
  CHECK(!r2.dense_storage);
  // both representations convert faithfully
  CHECK((r2.to_dense() - Eigen::MatrixXd(r2.to_sparse())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectral downsample covers the graph") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Graph g = testgen::random_no_isolated(60, 100, 8000 + s);
    std::vector<int> keep = spectral_downsample(g);
    CHECK(!keep.empty());
    CHECK(static_cast<int>(keep.size()) < 60);
    CHECK(std::is_sorted(keep.begin(), keep.end()));
    // kron after the downsample must not throw: every component is covered
    auto [gc, red] = kron_reduce(g, keep);
    CHECK(gc.num_nodes() == static_cast<int>(keep.size()));
  }
}

TEST_CASE("coarse map from independent-set members") {
  Graph g = build_graph({{0, 1, 1.0}, {1, 2, 3.0}, {2, 3, 1.0}});
  // members {1, 3}: node 0 attaches to 1, node 2 to its heaviest member = 1
  CoarseMap m = coarse_map_from_members(g, {1, 3});
  validate_coarse_map(m);
  CHECK(m.parent == std::vector<int>{1, 1, 1, 2});
  CHECK(m.tags[1] == NodeTag::real_singleton);
  CHECK(m.tags[0] == NodeTag::leftover_singleton);

  // a node with no member neighbor is an error
  CHECK_THROWS_AS(coarse_map_from_members(g, {0}), ComputeError);
}

TEST_CASE("coarse map from a retained set uses BFS distance") {
  Graph g = testgen::path(7);
  CoarseMap m = coarse_map_from_retained(g, {0, 6});
  validate_coarse_map(m);
  // ties at distance 3 go to the earlier-seeded source (node 0)
  CHECK(m.parent == std::vector<int>{1, 1, 1, 1, 2, 2, 2});

  Graph two = build_graph({{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK_THROWS_AS(coarse_map_from_retained(two, {0}), ComputeError);
  CHECK(coarse_map_from_retained(two, {0, 3}).parent == std::vector<int>{1, 1, 2, 2});
}
