#include <catch2/catch_amalgamated.hpp>

#include "relest/experiments.hpp"

using namespace relest;

TEST_CASE("example1 report satisfies the published tolerances") {
    const Example1Report rep = run_example1();
    REQUIRE(rep.wls_vector_ok);
    REQUIRE(rep.ls_vector_ok);
    REQUIRE(rep.wls_nqe_ok);
    REQUIRE(rep.ls_nqe_ok);
    REQUIRE(rep.lae_nqe_ok);
    REQUIRE(rep.entries.size() == 5);
}

TEST_CASE("sweep report is deterministic and pairs estimators on shared data") {
    SweepSpec spec;
    spec.param = SweepSpec::Param::p;
    spec.grid = {0.1, 0.3};
    spec.n = 20;
    spec.trials = 6;
    spec.seed = 11;
    const SweepReport a = run_sweep(spec);
    spec.threads = 2;
    const SweepReport b = run_sweep(spec);
    REQUIRE(a.cells.size() == b.cells.size());
    for (size_t i = 0; i < a.cells.size(); ++i) {
        REQUIRE(a.cells[i].estimator == b.cells[i].estimator);
        REQUIRE(a.cells[i].records.size() == 6);
        for (size_t k = 0; k < a.cells[i].records.size(); ++k)
            REQUIRE(a.cells[i].records[k].nqe_percent ==
                    b.cells[i].records[k].nqe_percent);
    }
    // within a trial every estimator sees the same seed (same instance)
    for (size_t k = 0; k < 6; ++k) {
        const std::uint64_t seed0 = a.cells[0].records[k].seed;
        for (size_t i = 1; i < 4; ++i)
            REQUIRE(a.cells[i].records[k].seed == seed0);
    }
}

TEST_CASE("sweep rejects bad specs") {
    SweepSpec spec;
    spec.grid = {};
    REQUIRE_THROWS_AS(run_sweep(spec), std::invalid_argument);
    spec.grid = {0.3};
    spec.trials = 0;
    REQUIRE_THROWS_AS(run_sweep(spec), std::invalid_argument);
    spec.trials = 1;
    spec.estimators = {"newton"};
    REQUIRE_THROWS_AS(run_sweep(spec), std::invalid_argument);
}

TEST_CASE("robustness at c=1 reproduces the baseline distribution") {
    RobustnessSpec spec;
    spec.factors = {1.0};
    spec.trials = 8;
    spec.n = 20;
    spec.seed = 5;
    const SweepReport base = run_robustness(spec);
    spec.factors = {0.75, 1.0};
    const SweepReport both = run_robustness(spec);
    // same seeds, so the c = 1 cell matches the single-factor run exactly
    const SweepCell& lone = base.cells[0];
    const SweepCell& c1 = both.cells[1];
    for (size_t k = 0; k < lone.records.size(); ++k)
        REQUIRE(lone.records[k].nqe_percent == c1.records[k].nqe_percent);
}

TEST_CASE("lae_vs_em produces finite averaged curves of the right shape") {
    LaeVsEmSpec spec;
    spec.p_edges = {0.5};
    spec.trials = 3;
    spec.horizon = 40;
    spec.n = 15;
    spec.seed = 3;
    const auto curves = run_lae_vs_em(spec);
    REQUIRE(curves.size() == 1);
    REQUIRE(curves[0].em_nqe.size() == 40);
    REQUIRE(curves[0].lae_nqe.size() == 40);
    for (double v : curves[0].em_nqe) REQUIRE(std::isfinite(v));
    // both start near the zero-estimate error (100%) and decrease
    REQUIRE(curves[0].em_nqe.front() > curves[0].em_nqe.back());
    REQUIRE(curves[0].lae_nqe.front() > curves[0].lae_nqe.back());
}

TEST_CASE("first_iteration_below finds the crossing") {
    REQUIRE(first_iteration_below({5.0, 2.0, 0.5, 0.1}, 0.5) == 3);
    REQUIRE(first_iteration_below({5.0, 2.0}, 0.5) == -1);
}

TEST_CASE("sweep wall-clock budget at reduced trial count") {
    // full-scale budget is 250 trials in 5 minutes for one grid point;
    // run a tenth of the trials in a tenth of the budget
    SweepSpec spec;
    spec.param = SweepSpec::Param::p;
    spec.grid = {0.1};
    spec.trials = 25;
    spec.seed = 31;
    const auto start = std::chrono::steady_clock::now();
    const SweepReport rep = run_sweep(spec);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    REQUIRE(rep.cells.size() == 4);
    REQUIRE(elapsed < 30.0);
}
