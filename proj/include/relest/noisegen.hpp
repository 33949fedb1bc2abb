#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>

#include <Eigen/Dense>

#include "relest/graph.hpp"
#include "relest/linalg.hpp"
#include "relest/random.hpp"

namespace relest {

/// Two-component Gaussian mixture: std alpha with probability 1-p,
/// std beta with probability p.
struct MixtureNoise {
    double alpha;
    double beta;
    double p;

    MixtureNoise(double alpha_, double beta_, double p_)
        : alpha(alpha_), beta(beta_), p(p_) {
        if (!(alpha > 0.0 && beta > alpha))
            throw std::invalid_argument("MixtureNoise: need 0 < alpha < beta");
        if (!(p > 0.0 && p < 0.5))
            throw std::invalid_argument("MixtureNoise: need p in (0, 1/2)");
    }
};

/// Model-mismatch noise: Gaussian of std alpha with probability 1-p,
/// uniform on [-delta/4, +delta/4] with probability p.
struct MismatchNoise {
    double alpha;
    double p;
    double delta;

    MismatchNoise(double alpha_, double p_, double delta_ = 2.0)
        : alpha(alpha_), p(p_), delta(delta_) {
        if (!(alpha > 0.0))
            throw std::invalid_argument("MismatchNoise: alpha must be positive");
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("MismatchNoise: p must be in (0,1)");
        if (!(delta > 0.0))
            throw std::invalid_argument("MismatchNoise: delta must be positive");
    }
};

/// A graph plus its measurement vector; synthetic sets also carry the
/// ground truth used to generate them.
struct MeasurementSet {
    Graph graph;
    Eigen::VectorXd b;
    std::optional<Eigen::VectorXd> x_true;
    std::optional<Eigen::VectorXi> z_true;
    std::variant<std::monostate, MixtureNoise, MismatchNoise> noise;
    std::uint64_t seed = 0;
};

namespace detail {

// Substream tags; a fixed enum keeps replays stable across versions.
enum Stream : std::uint64_t {
    kGraphStream = 1,
    kStateStream = 2,
    kMeasureStream = 3,
    kMismatchStream = 4,
};

// One rng per node pair: shared edges see identical draws across sweep
// grid points (common random numbers), and label sets are nested in p.
inline Rng pair_rng(std::uint64_t seed, Stream stream, int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return make_rng(derive_seed(seed, stream), (lo << 21) | hi);
}

}  // namespace detail

/// n i.i.d. uniform(0,1) entries, mean subtracted.
inline Eigen::VectorXd generate_state(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("generate_state: n must be >= 2");
    Rng rng = make_rng(seed, detail::kStateStream);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = u01(rng);
    return mean_centered(x);
}

/// Erdos-Renyi graph on n nodes with edge probability p_edge, resampled
/// wholesale until connected. Edges oriented toward the smaller node id
/// (row +1 at the smaller id), matching the repo convention.
inline Graph generate_er_graph(int n, double p_edge, std::uint64_t seed,
                               int* attempts_out = nullptr,
                               int max_attempts = 10000) {
    if (n < 2) throw std::invalid_argument("generate_er_graph: n must be >= 2");
    if (!(p_edge > 0.0 && p_edge <= 1.0))
        throw std::invalid_argument("generate_er_graph: p_edge must be in (0,1]");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<Edge> edges;
        for (int u = 0; u < n; ++u) {
            for (int v = u + 1; v < n; ++v) {
                Rng rng = detail::pair_rng(seed + static_cast<std::uint64_t>(attempt) * 0x51ed270bULL,
                                           detail::kGraphStream, u, v);
                if (u01(rng) < p_edge) edges.push_back(Edge{v, u});
            }
        }
        Graph g(n, std::move(edges));
        if (g.n_edges() > 0 && is_connected(g)) {
            if (attempts_out) *attempts_out = attempt + 1;
            return g;
        }
    }
    throw std::runtime_error(
        "generate_er_graph: no connected graph in 10000 attempts; increase p_edge");
}

/// b = A x_true + eta with eta_e ~ N(0, sigma_e^2),
/// sigma_e = (1-z_e) alpha + z_e beta, z_e ~ Bernoulli(p).
inline MeasurementSet sample_measurements(const Graph& g,
                                          const Eigen::VectorXd& x_true,
                                          const MixtureNoise& noise,
                                          std::uint64_t seed) {
    if (x_true.size() != g.n_nodes())
        throw std::invalid_argument("sample_measurements: |x_true| != n_nodes");
    const int m = g.n_edges();
    Eigen::VectorXd b(m);
    Eigen::VectorXi z(m);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int e = 0; e < m; ++e) {
        const Edge& ed = g.edge(e);
        Rng rng = detail::pair_rng(seed, detail::kMeasureStream, ed.from, ed.to);
        z(e) = u01(rng) < noise.p ? 1 : 0;
        const double sigma = z(e) ? noise.beta : noise.alpha;
        b(e) = x_true(ed.to) - x_true(ed.from) + sigma * gauss(rng);
    }
    return MeasurementSet{g, std::move(b), x_true, std::move(z), noise, seed};
}

/// b = A x_true + (1-z) alpha eta + z gamma with gamma uniform on
/// [-delta/4, +delta/4] and z ~ Bernoulli(p).
inline MeasurementSet sample_mismatch(const Graph& g,
                                      const Eigen::VectorXd& x_true,
                                      const MismatchNoise& noise,
                                      std::uint64_t seed) {
    if (x_true.size() != g.n_nodes())
        throw std::invalid_argument("sample_mismatch: |x_true| != n_nodes");
    const int m = g.n_edges();
    Eigen::VectorXd b(m);
    Eigen::VectorXi z(m);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int e = 0; e < m; ++e) {
        const Edge& ed = g.edge(e);
        Rng rng = detail::pair_rng(seed, detail::kMismatchStream, ed.from, ed.to);
        z(e) = u01(rng) < noise.p ? 1 : 0;
        const double eta = gauss(rng);
        const double gamma = (u01(rng) * 2.0 - 1.0) * noise.delta / 4.0;
        b(e) = x_true(ed.to) - x_true(ed.from) +
               (z(e) ? gamma : noise.alpha * eta);
    }
    return MeasurementSet{g, std::move(b), x_true, std::move(z), noise, seed};
}

}  // namespace relest
