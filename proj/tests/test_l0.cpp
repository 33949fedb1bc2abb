#include <catch2/catch_amalgamated.hpp>

#include "relest/experiments.hpp"
#include "relest/l0.hpp"
#include "relest/noisegen.hpp"

using namespace relest;

TEST_CASE("noiseless data needs no outlier labels") {
    const Graph g = generate_er_graph(6, 0.6, 2);
    const Eigen::MatrixXd a = incidence_matrix(g);
    const Eigen::VectorXd x_true = generate_state(6, 2);
    const L0Result r = l0_oracle(a * x_true, a, 0.1, 1.0);
    REQUIRE(r.support == 0);
}

TEST_CASE("a single edge is always exactly fittable") {
    const Eigen::MatrixXd a = incidence_matrix(Graph(2, {Edge{1, 0}}));
    Eigen::VectorXd b(1);
    b << 10.0;
    const L0Result r = l0_oracle(b, a, 0.1, 1.0);
    REQUIRE(r.support == 0);
}

TEST_CASE("triangle with one corrupted edge") {
    // edges (1,0), (2,1), (2,0): residual around the cycle is fixed at
    // b0 + b1 - b2, so feasibility is a slab intersection we can hand-check.
    const Graph g(3, {Edge{1, 0}, Edge{2, 1}, Edge{2, 0}});
    const Eigen::MatrixXd a = incidence_matrix(g);
    const double alpha = 0.1, beta = 1.0;
    SECTION("consistent cycle fits with support 0") {
        Eigen::VectorXd b(3);
        b << 0.2, 0.3, 0.55;  // cycle gap 0.2+0.3-0.55 = -0.05, within 3*3alpha
        REQUIRE(l0_oracle(b, a, alpha, beta).support == 0);
    }
    SECTION("large cycle inconsistency forces one bad label") {
        Eigen::VectorXd b(3);
        b << 2.0, 0.0, 0.0;  // gap 2.0 > 0.9 = sum of good caps
        const L0Result r = l0_oracle(b, a, alpha, beta);
        REQUIRE(r.support == 1);
        REQUIRE(r.z(0) == 1);  // the corrupted edge is the only size-1 choice
    }
    SECTION("flagged when infeasible at every labeling") {
        Eigen::VectorXd b(3);
        b << 20.0, 0.0, 0.0;  // gap 20 > 9 = sum of bad caps
        REQUIRE_THROWS_AS(l0_oracle(b, a, alpha, beta), std::runtime_error);
    }
}

TEST_CASE("reference instance needs at most two bad labels") {
    const MeasurementSet ms = example1_data();
    const Eigen::MatrixXd a = incidence_matrix(ms.graph);
    const L0Result r = l0_oracle(ms.b, a, 0.1, 1.0);
    REQUIRE(r.support <= 2);
    // re-check the returned support satisfies the slab constraints via an
    // independent least-squares fit restricted to the good edges
    REQUIRE(detail::interval_feasible(
        ms.b, a,
        (Eigen::VectorXd::Constant(6, 0.3) +
         2.7 * r.z.cast<double>())));
}

TEST_CASE("enumeration order guarantees minimal support") {
    // every support of size < returned support must be infeasible
    const MeasurementSet ms = example1_data();
    const Eigen::MatrixXd a = incidence_matrix(ms.graph);
    const L0Result r = l0_oracle(ms.b, a, 0.1, 1.0);
    if (r.support > 0) {
        Eigen::VectorXd cap(6);
        for (int e = 0; e < 6; ++e) cap(e) = 0.3;
        REQUIRE_FALSE(detail::interval_feasible(ms.b, a, cap));
    }
}

TEST_CASE("oracle rejects oversized instances and bad parameters") {
    const Graph g = generate_er_graph(8, 0.9, 5);
    REQUIRE(g.n_edges() > 20);
    const Eigen::MatrixXd a = incidence_matrix(g);
    REQUIRE_THROWS_AS(l0_oracle(Eigen::VectorXd::Zero(g.n_edges()), a, 0.1, 1.0),
                      std::invalid_argument);
    const Eigen::MatrixXd a2 = incidence_matrix(Graph(2, {Edge{1, 0}}));
    REQUIRE_THROWS_AS(l0_oracle(Eigen::VectorXd::Zero(1), a2, 1.0, 0.5),
                      std::invalid_argument);
}
