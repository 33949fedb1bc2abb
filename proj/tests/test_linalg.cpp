#include <catch2/catch_amalgamated.hpp>

#include "relest/graph.hpp"
#include "relest/linalg.hpp"
#include "relest/noisegen.hpp"

using namespace relest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Graph example1_graph() {
    return Graph(5, {Edge{1, 0}, Edge{4, 0}, Edge{2, 1}, Edge{4, 1}, Edge{3, 2},
                     Edge{4, 3}});
}

// Naive triple product, independent of the Eigen expression in the library.
Eigen::MatrixXd laplacian_by_loops(const Eigen::MatrixXd& a,
                                   const Eigen::VectorXd& w) {
    const Eigen::Index n = a.cols();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index e = 0; e < a.rows(); ++e)
                l(i, j) += a(e, i) * w(e) * a(e, j);
    return l;
}

void check_penrose(const Eigen::MatrixXd& l, const Eigen::MatrixXd& ld) {
    const double scale = l.norm();
    REQUIRE((l * ld * l - l).norm() <= 1e-10 * scale);
    REQUIRE((ld * l * ld - ld).norm() <= 1e-10 * ld.norm());
    REQUIRE(((l * ld) - (l * ld).transpose()).norm() <= 1e-10);
    REQUIRE(((ld * l) - (ld * l).transpose()).norm() <= 1e-10);
}

}  // namespace

TEST_CASE("weighted laplacian of a single edge") {
    const Graph g(2, {Edge{1, 0}});
    const Eigen::MatrixXd a = incidence_matrix(g);
    const Eigen::MatrixXd l = weighted_laplacian(a, Eigen::VectorXd::Ones(1));
    Eigen::MatrixXd expected(2, 2);
    expected << 1, -1, -1, 1;
    REQUIRE(l == expected);
}

TEST_CASE("uniform weights give the combinatorial laplacian") {
    const Graph g = example1_graph();
    const Eigen::MatrixXd a = incidence_matrix(g);
    const Eigen::MatrixXd l = weighted_laplacian(a, Eigen::VectorXd::Ones(6));
    // degrees 2,3,2,2,3 on the diagonal, -1 per edge off-diagonal
    Eigen::VectorXd deg(5);
    deg << 2, 3, 2, 2, 3;
    REQUIRE(l.diagonal() == deg);
    REQUIRE(l(0, 1) == -1.0);
    REQUIRE(l(0, 4) == -1.0);
    REQUIRE(l(0, 2) == 0.0);
    REQUIRE((l * Eigen::VectorXd::Ones(5)).isZero(1e-14));
}

TEST_CASE("weighted laplacian matches a naive loop computation") {
    const Eigen::MatrixXd a = incidence_matrix(example1_graph());
    Eigen::VectorXd w(6);
    w << 100, 100, 100, 100, 1, 1;
    REQUIRE((weighted_laplacian(a, w) - laplacian_by_loops(a, w)).norm() <= 1e-12);
}

TEST_CASE("weighted laplacian rejects bad weights") {
    const Eigen::MatrixXd a = incidence_matrix(example1_graph());
    REQUIRE_THROWS_AS(weighted_laplacian(a, Eigen::VectorXd::Ones(5)),
                      std::invalid_argument);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(6);
    w(3) = 0.0;
    REQUIRE_THROWS_AS(weighted_laplacian(a, w), std::invalid_argument);
}

TEST_CASE("pinv of the single-edge laplacian") {
    Eigen::MatrixXd l(2, 2);
    l << 1, -1, -1, 1;
    const Eigen::MatrixXd ld = pinv_laplacian(l);
    Eigen::MatrixXd expected(2, 2);
    expected << 0.25, -0.25, -0.25, 0.25;
    REQUIRE((ld - expected).norm() <= 1e-14);
}

TEST_CASE("pinv satisfies the Penrose identities and annihilates ones") {
    const Eigen::MatrixXd a = incidence_matrix(example1_graph());
    Eigen::VectorXd w(6);
    w << 100, 100, 100, 100, 1, 1;
    const Eigen::MatrixXd l = weighted_laplacian(a, w);
    const Eigen::MatrixXd ld = pinv_laplacian(l);
    check_penrose(l, ld);
    REQUIRE((ld * Eigen::VectorXd::Ones(5)).norm() <= 1e-10);
}

TEST_CASE("pinv Penrose identities on random connected graphs") {
    for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
        const Graph g = generate_er_graph(30, 0.2, seed);
        const Eigen::MatrixXd a = incidence_matrix(g);
        Rng rng = make_rng(seed, 5);
        std::uniform_real_distribution<double> u(0.1, 10.0);
        Eigen::VectorXd w(g.n_edges());
        for (int e = 0; e < g.n_edges(); ++e) w(e) = u(rng);
        const Eigen::MatrixXd l = weighted_laplacian(a, w);
        check_penrose(l, pinv_laplacian(l));
    }
}

TEST_CASE("spectral norm of a single edge is sqrt(2)") {
    const Eigen::MatrixXd a = incidence_matrix(Graph(2, {Edge{1, 0}}));
    REQUIRE_THAT(spectral_norm(a), WithinRel(std::sqrt(2.0), 1e-12));
}

TEST_CASE("spectral norm is absolutely homogeneous") {
    const Eigen::MatrixXd a = incidence_matrix(example1_graph());
    REQUIRE_THAT(spectral_norm(-2.5 * a), WithinRel(2.5 * spectral_norm(a), 1e-12));
}

TEST_CASE("spectral norm squared equals the largest laplacian eigenvalue") {
    const Eigen::MatrixXd a = incidence_matrix(example1_graph());
    const Eigen::MatrixXd l = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    const double n = spectral_norm(a);
    REQUIRE_THAT(n * n, WithinRel(lmax, 1e-10));
}

TEST_CASE("kernel dimension counts components") {
    const Eigen::MatrixXd a1 = incidence_matrix(example1_graph());
    REQUIRE(kernel_dimension(weighted_laplacian(a1, Eigen::VectorXd::Ones(6))) == 1);
    // two disjoint edges on 4 nodes
    const Graph g2(4, {Edge{1, 0}, Edge{3, 2}});
    const Eigen::MatrixXd a2 = incidence_matrix(g2);
    REQUIRE(kernel_dimension(weighted_laplacian(a2, Eigen::VectorXd::Ones(2))) == 2);
}

TEST_CASE("near-zero weights push eigenvalues into the kernel count") {
    const Graph g(4, {Edge{1, 0}, Edge{2, 1}, Edge{3, 2}});
    const Eigen::MatrixXd a = incidence_matrix(g);
    Eigen::VectorXd w(3);
    w << 1.0, 1e-30, 1.0;  // middle edge effectively severed
    const Eigen::MatrixXd l = weighted_laplacian(a, w);
    REQUIRE(kernel_dimension(l) == 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
    REQUIRE(es.eigenvalues()(1) <= 1e-10 * es.eigenvalues()(3));
}
