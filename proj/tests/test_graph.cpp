#include <catch2/catch_amalgamated.hpp>

#include "relest/graph.hpp"
#include "relest/noisegen.hpp"

using namespace relest;

namespace {

Graph example1_graph() {
    return Graph(5, {Edge{1, 0}, Edge{4, 0}, Edge{2, 1}, Edge{4, 1}, Edge{3, 2},
                     Edge{4, 3}});
}

}  // namespace

TEST_CASE("incidence matrix reproduces the printed 6x5 example") {
    const Eigen::MatrixXd a = incidence_matrix(example1_graph());
    Eigen::MatrixXd expected(6, 5);
    expected << 1, -1, 0, 0, 0,
                1, 0, 0, 0, -1,
                0, 1, -1, 0, 0,
                0, 1, 0, 0, -1,
                0, 0, 1, -1, 0,
                0, 0, 0, 1, -1;
    REQUIRE(a == expected);
}

TEST_CASE("incidence matrix of a single edge") {
    const Graph g(2, {Edge{1, 0}});
    const Eigen::MatrixXd a = incidence_matrix(g);
    REQUIRE(a.rows() == 1);
    REQUIRE(a(0, 0) == 1.0);
    REQUIRE(a(0, 1) == -1.0);
}

TEST_CASE("incidence rows sum to zero with one +1 and one -1") {
    const Graph g = generate_er_graph(12, 0.4, 7);
    const Eigen::MatrixXd a = incidence_matrix(g);
    REQUIRE((a * Eigen::VectorXd::Ones(12)).isZero(0.0));
    for (int e = 0; e < g.n_edges(); ++e) {
        int plus = 0, minus = 0;
        for (int v = 0; v < 12; ++v) {
            if (a(e, v) == 1.0) ++plus;
            if (a(e, v) == -1.0) ++minus;
        }
        REQUIRE(plus == 1);
        REQUIRE(minus == 1);
    }
}

TEST_CASE("connectivity") {
    REQUIRE(is_connected(example1_graph()));
    REQUIRE_FALSE(is_connected(Graph(3, {Edge{1, 0}})));
    REQUIRE(is_connected(Graph(1, {})));
}

TEST_CASE("graph validation rejects bad input") {
    REQUIRE_THROWS_AS(Graph(0, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(Graph(3, {Edge{0, 3}}), std::invalid_argument);
    REQUIRE_THROWS_AS(Graph(3, {Edge{1, 1}}), std::invalid_argument);
    // parallel edges are rejected in either orientation
    REQUIRE_THROWS_AS(Graph(3, {Edge{0, 1}, Edge{1, 0}}), std::invalid_argument);
}
