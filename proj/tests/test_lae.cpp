#include <catch2/catch_amalgamated.hpp>

#include "relest/estimators.hpp"
#include "relest/experiments.hpp"
#include "relest/metrics.hpp"
#include "relest/noisegen.hpp"

using namespace relest;
using Catch::Matchers::WithinRel;

TEST_CASE("lae reproduces the printed l1 error ratio") {
    const MeasurementSet ms = example1_data();
    const Eigen::MatrixXd a = incidence_matrix(ms.graph);
    const EstimateResult r = lae(ms.b, a);
    const double ratio = nqe(r.x_hat, *ms.x_true) / 100.0;
    REQUIRE_THAT(ratio, WithinRel(1.52e-2, 0.10));
}

TEST_CASE("lae is exact on noiseless data") {
    const Graph g = generate_er_graph(15, 0.4, 6);
    const Eigen::MatrixXd a = incidence_matrix(g);
    const Eigen::VectorXd x_true = generate_state(15, 6);
    const EstimateResult r = lae(a * x_true, a);
    REQUIRE((r.x_hat - x_true).norm() <= 1e-6);
}

TEST_CASE("irls and subgradient modes agree on the l1 objective") {
    for (std::uint64_t seed : {101u, 102u, 103u}) {
        const Graph g = generate_er_graph(12, 0.4, seed);
        const Eigen::MatrixXd a = incidence_matrix(g);
        const Eigen::VectorXd x_true = generate_state(12, seed);
        const MeasurementSet ms =
            sample_measurements(g, x_true, MixtureNoise(0.1, 1.0, 0.3), seed);

        LaeConfig sharp;
        sharp.refine = true;  // continue to the exact l1 optimum
        const double obj_irls = (ms.b - a * lae(ms.b, a, sharp).x_hat).lpNorm<1>();

        LaeConfig sub;
        sub.mode = LaeConfig::Mode::subgradient;
        const double obj_sub = (ms.b - a * lae(ms.b, a, sub).x_hat).lpNorm<1>();

        REQUIRE(std::abs(obj_irls - obj_sub) <= 0.01 * obj_irls);
    }
}

TEST_CASE("subgradient mode records a trace when truth is supplied") {
    const MeasurementSet ms = example1_data();
    const Eigen::MatrixXd a = incidence_matrix(ms.graph);
    LaeConfig cfg;
    cfg.mode = LaeConfig::Mode::subgradient;
    cfg.subgradient_iters = 50;
    const EstimateResult r = lae(ms.b, a, cfg, &*ms.x_true);
    REQUIRE(r.trace.size() == 50);
    REQUIRE(r.trace.front().iter == 1);
    REQUIRE(std::isfinite(r.trace.back().nqe));
}

TEST_CASE("lae rejects disconnected graphs") {
    const Graph g(4, {Edge{1, 0}, Edge{3, 2}});
    REQUIRE_THROWS_AS(lae(Eigen::VectorXd::Zero(2), incidence_matrix(g)),
                      std::invalid_argument);
}
