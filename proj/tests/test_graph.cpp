#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "grc/errors.hpp"
#include "grc/graph.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace grc;

TEST_CASE("build_graph infers size, sums duplicates, drops self loops") {
  Graph g = build_graph({{0, 1, 1.0}, {1, 0, 2.0}, {2, 2, 5.0}, {1, 2, 0.5}});
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.edge_weight(0, 1) == 3.0);  // duplicate collapsed by summing
  CHECK(g.edge_weight(1, 2) == 0.5);
  CHECK(g.self_loops_dropped == 1);
  CHECK(g.degree(1) == 3.5);
}

TEST_CASE("build_graph rejects bad input") {
  CHECK_THROWS_AS(build_graph({{-1, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_graph({{0, 3, 1.0}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_graph({{0, 1, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_graph({{0, 1, -2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_graph({{0, 1, std::numeric_limits<double>::quiet_NaN()}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_graph({{0, 1, std::numeric_limits<double>::infinity()}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_graph({}, -1), std::invalid_argument);
}

TEST_CASE("explicit node count keeps trailing isolated nodes") {
  Graph g = build_graph({{0, 1, 1.0}}, 5);
  CHECK(g.num_nodes() == 5);
  CHECK(g.has_isolated_nodes());
  CHECK(g.neighbor_count(4) == 0);
}

TEST_CASE("edges come out canonical: u < v, lexicographic") {
  Graph g = build_graph({{3, 1, 1.0}, {2, 0, 1.0}, {1, 0, 1.0}});
  auto e = g.edges();
  REQUIRE(e.size() == 3);
  CHECK(e[0].u == 0);
  CHECK(e[0].v == 1);
  CHECK(e[1].u == 0);
  CHECK(e[1].v == 2);
  CHECK(e[2].u == 1);
  CHECK(e[2].v == 3);
}

TEST_CASE("path laplacian, row by row") {
  Graph g = testgen::path(3);
  Eigen::MatrixXd l = Eigen::MatrixXd(laplacian(g).matrix);
  Eigen::MatrixXd want(3, 3);
  want << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK((l - want).cwiseAbs().maxCoeff() == 0.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
  CHECK(es.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(es.eigenvalues()[1] == doctest::Approx(1.0));
  CHECK(es.eigenvalues()[2] == doctest::Approx(3.0));
}

TEST_CASE("complete-graph spectrum is 0 then n") {
  Graph g = testgen::complete(4);
  Eigen::MatrixXd l = Eigen::MatrixXd(laplacian(g).matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
  CHECK(es.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-12));
  for (int k = 1; k < 4; ++k) CHECK(es.eigenvalues()[k] == doctest::Approx(4.0));
}

TEST_CASE("laplacian matches the dense reference on random graphs") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Graph g = testgen::random_graph(30, 60, 1000 + s);
    Eigen::MatrixXd l = Eigen::MatrixXd(laplacian(g).matrix);
    Eigen::MatrixXd want = oracle::dense_laplacian(30, g.edges());
    CHECK((l - want).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("normalized laplacian") {
  Graph g = testgen::path(3);
  Eigen::MatrixXd l = Eigen::MatrixXd(laplacian(g, LaplacianKind::normalized).matrix);
  Eigen::MatrixXd want = oracle::dense_normalized_laplacian(3, g.edges());
  CHECK((l - want).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(l(0, 0) == 1.0);
  CHECK(l(0, 1) == doctest::Approx(-1.0 / std::sqrt(2.0)));

  for (std::uint64_t s = 0; s < 10; ++s) {
    Graph r = testgen::random_no_isolated(40, 70, 2000 + s);
    Eigen::MatrixXd ln = Eigen::MatrixXd(laplacian(r, LaplacianKind::normalized).matrix);
    CHECK((ln - oracle::dense_normalized_laplacian(40, r.edges())).cwiseAbs().maxCoeff() <= 1e-13);
  }

  Graph iso = build_graph({{0, 1, 1.0}}, 3);
  CHECK_THROWS_AS(laplacian(iso, LaplacianKind::normalized), ComputeError);
}

TEST_CASE("incidence factor reproduces the laplacian") {
  Graph single = build_graph({{0, 1, 4.0}});
  IncidenceMatrix b = incidence(single);
  REQUIRE(b.matrix.cols() == 1);
  CHECK(b.matrix.coeff(0, 0) == -2.0);  // -sqrt(4) at the smaller id
  CHECK(b.matrix.coeff(1, 0) == 2.0);
  REQUIRE(b.edge_order.size() == 1);
  CHECK(b.edge_order[0] == std::make_pair(0, 1));

  for (std::uint64_t s = 0; s < 10; ++s) {
    Graph g = testgen::random_connected(25, 30, 3000 + s);
    IncidenceMatrix bb = incidence(g);
    Eigen::MatrixXd prod = Eigen::MatrixXd(SpMat(bb.matrix * bb.matrix.transpose()));
    Eigen::MatrixXd l = Eigen::MatrixXd(laplacian(g).matrix);
    CHECK((prod - l).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("quadratic form") {
  Graph g = build_graph({{0, 1, 3.0}});
  LaplacianMatrix l = laplacian(g);
  Eigen::VectorXd x(2);
  x << 1.0, -1.0;
  CHECK(quadratic_form(l, x) == doctest::Approx(12.0));  // w * (x_u - x_v)^2

  Eigen::VectorXd wrong(3);
  wrong.setZero();
  CHECK_THROWS_AS(quadratic_form(l, wrong), std::invalid_argument);
}

TEST_CASE("connected components label by first appearance") {
  Graph g = build_graph({{0, 1, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}}, 6);
  Components c = connected_components(g);
  CHECK(c.count == 3);
  CHECK(c.label[0] == 0);
  CHECK(c.label[1] == 0);
  CHECK(c.label[2] == 1);
  CHECK(c.label[3] == 1);
  CHECK(c.label[4] == 1);
  CHECK(c.label[5] == 2);  // isolated node is its own component

  Components one = connected_components(testgen::random_connected(50, 40, 77));
  CHECK(one.count == 1);
}

TEST_CASE("graph_from_adjacency") {
  std::vector<Eigen::Triplet<double>> t = {{0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 7.0}};
  SpMat a(2, 2);
  a.setFromTriplets(t.begin(), t.end());
  Graph g = graph_from_adjacency(a);
  CHECK(g.num_edges() == 1);
  CHECK(g.edge_weight(0, 1) == 2.0);
  CHECK(g.self_loops_dropped == 1);

  // asymmetry
  std::vector<Eigen::Triplet<double>> bad = {{0, 1, 2.0}, {1, 0, 2.5}};
  SpMat ab(2, 2);
  ab.setFromTriplets(bad.begin(), bad.end());
  CHECK_THROWS_AS(graph_from_adjacency(ab), std::invalid_argument);

  // negative weight
  std::vector<Eigen::Triplet<double>> neg = {{0, 1, -1.0}, {1, 0, -1.0}};
  SpMat an(2, 2);
  an.setFromTriplets(neg.begin(), neg.end());
  CHECK_THROWS_AS(graph_from_adjacency(an), std::invalid_argument);

  // pruning small entries
  std::vector<Eigen::Triplet<double>> tiny = {
      {0, 1, 1.0}, {1, 0, 1.0}, {0, 2, 1e-15}, {2, 0, 1e-15}};
  SpMat at(3, 3);
  at.setFromTriplets(tiny.begin(), tiny.end());
  CHECK(graph_from_adjacency(at, 1e-12).num_edges() == 1);
  CHECK(graph_from_adjacency(at).num_edges() == 2);
}

TEST_CASE("is_valid_laplacian") {
  Graph g = testgen::random_connected(20, 25, 5);
  Eigen::MatrixXd l = oracle::dense_laplacian(20, g.edges());
  CHECK(is_valid_laplacian(l, 1e-10, 1e-12));
  CHECK(is_valid_laplacian(laplacian(g).matrix, 1e-10, 1e-12));

  Eigen::MatrixXd pos = l;
  pos(0, 1) = 0.5;
  pos(1, 0) = 0.5;
  CHECK_FALSE(is_valid_laplacian(pos, 1.5, 1e-12));  // positive off-diagonal

  Eigen::MatrixXd rowsum = l;
  rowsum(0, 0) += 1e-3;
  CHECK_FALSE(is_valid_laplacian(rowsum, 1e-10, 1e-12));  // row sum off
  CHECK(is_valid_laplacian(rowsum, 1e-2, 1e-12));
}
