#include <catch2/catch_amalgamated.hpp>

#include "relest/metrics.hpp"
#include "relest/random.hpp"

using namespace relest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("nqe basics") {
    Eigen::VectorXd x(3);
    x << 1.0, 2.0, 3.0;
    REQUIRE(nqe(x, x) == 0.0);
    REQUIRE_THROWS_AS(nqe(x, Eigen::VectorXd::Ones(3)), std::invalid_argument);
    REQUIRE_THROWS_AS(nqe(x, Eigen::VectorXd::Ones(2)), std::invalid_argument);
}

TEST_CASE("nqe is shift invariant and scales quadratically in the error") {
    Rng rng(4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd xt(8), err(8);
    for (int i = 0; i < 8; ++i) {
        xt(i) = gauss(rng);
        err(i) = gauss(rng);
    }
    const double base = nqe(xt + err, xt);
    REQUIRE_THAT(nqe((xt + err).array() + 5.0, xt.array() - 3.0),
                 WithinRel(base, 1e-10));
    REQUIRE_THAT(nqe(xt + 2.0 * err, xt), WithinRel(4.0 * base, 1e-10));
}

TEST_CASE("misclassification counts threshold crossings") {
    Eigen::VectorXd pi(4);
    Eigen::VectorXi z(4);
    pi << 0.9, 0.1, 0.8, 0.2;
    z << 1, 0, 1, 0;
    REQUIRE(misclassification(pi, z) == 0.0);
    Eigen::VectorXi flipped = (1 - z.array()).matrix();
    REQUIRE(misclassification(pi, flipped) == 1.0);
    // exactly at the threshold counts as good
    Eigen::VectorXd half = Eigen::VectorXd::Constant(4, 0.5);
    REQUIRE(misclassification(half, z) == 0.5);
}

TEST_CASE("summarize on a symmetric list") {
    const Summary s = summarize({1, 2, 3, 4, 5});
    REQUIRE(s.median == 3.0);
    REQUIRE(s.q25 == 2.0);
    REQUIRE(s.q75 == 4.0);
    REQUIRE(s.mean == 3.0);
    REQUIRE(s.outliers.empty());
    REQUIRE(s.whisker_low == 1.0);
    REQUIRE(s.whisker_high == 5.0);
}

TEST_CASE("summarize constant list") {
    const Summary s = summarize({2.5, 2.5, 2.5});
    REQUIRE(s.median == 2.5);
    REQUIRE(s.q25 == 2.5);
    REQUIRE(s.q75 == 2.5);
    REQUIRE(s.whisker_low == 2.5);
    REQUIRE(s.whisker_high == 2.5);
    REQUIRE(s.outliers.empty());
}

TEST_CASE("summarize flags points beyond 1.5 IQR") {
    // q25=3.25, q75=7.75, IQR=4.5, high fence 14.5
    const Summary s = summarize({1, 2, 3, 4, 5, 6, 7, 8, 9, 100});
    REQUIRE(s.outliers == std::vector<double>{100.0});
    REQUIRE(s.whisker_high == 9.0);
    REQUIRE(s.whisker_low == 1.0);
    REQUIRE_THAT(s.q25, WithinAbs(3.25, 1e-12));
    REQUIRE_THAT(s.q75, WithinAbs(7.75, 1e-12));
}

TEST_CASE("summarize ordering invariants on random data") {
    Rng rng(8);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int k = 0; k < 30; ++k) {
        std::vector<double> v(static_cast<size_t>(5 + rng() % 40));
        for (auto& x : v) x = u(rng);
        const Summary s = summarize(v);
        REQUIRE(s.q25 <= s.median);
        REQUIRE(s.median <= s.q75);
        for (double out : s.outliers) {
            const bool outside = out < s.whisker_low || out > s.whisker_high;
            REQUIRE(outside);
        }
    }
    REQUIRE_THROWS_AS(summarize({}), std::invalid_argument);
}
