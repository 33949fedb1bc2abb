#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "relest/linalg.hpp"
#include "relest/metrics.hpp"
#include "relest/result.hpp"

namespace relest {

/// Minimum-norm weighted least squares estimate pinv(A'WA) A'W b.
/// This is the ML estimate when every edge's noise class is known.
inline EstimateResult wls(const Eigen::VectorXd& b, const Eigen::MatrixXd& a,
                          const Eigen::VectorXd& w) {
    if (b.size() != a.rows())
        throw std::invalid_argument("wls: |b| != |E|");
    const Eigen::MatrixXd l = weighted_laplacian(a, w);
    if (kernel_dimension(l) != 1)
        throw std::invalid_argument("wls: graph is not connected");
    EstimateResult res;
    res.x_hat = pinv_laplacian(l) * (a.transpose() * (w.asDiagonal() * b));
    res.iterations = 1;
    return res;
}

/// Unweighted least squares (all edges trusted equally).
inline EstimateResult ls(const Eigen::VectorXd& b, const Eigen::MatrixXd& a) {
    return wls(b, a, Eigen::VectorXd::Ones(a.rows()));
}

/// Gradient-descent solution of the WLS problem:
/// x <- (I - tau L_W) x + tau A'W b from x = 0. Requires
/// tau < 2/||L_W|| for convergence; out-of-range tau is rejected.
inline EstimateResult gd_wls(const Eigen::VectorXd& b, const Eigen::MatrixXd& a,
                             const Eigen::VectorXd& w, double tau,
                             double tol = 1e-10, int max_iter = 100000) {
    const Eigen::MatrixXd l = weighted_laplacian(a, w);
    const double l_norm = spectral_norm(l);
    if (!(tau > 0.0 && tau < 2.0 / l_norm))
        throw std::invalid_argument("gd_wls: tau outside (0, 2/||L_W||)");
    const Eigen::VectorXd atwb = a.transpose() * (w.asDiagonal() * b);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
    EstimateResult res;
    res.converged = false;
    for (int t = 0; t < max_iter; ++t) {
        Eigen::VectorXd next = x - tau * (l * x) + tau * atwb;
        const double sc = relative_step(next, x);
        x = std::move(next);
        res.iterations = t + 1;
        if (sc < tol) {
            res.converged = true;
            break;
        }
    }
    res.x_hat = std::move(x);
    return res;
}

/// Least absolute (l1 residual) estimation.
struct LaeConfig {
    enum class Mode { irls, subgradient };
    Mode mode = Mode::irls;
    /// IRLS smoothing: weights 1/sqrt(r^2 + delta^2). The fixed default
    /// gives the smoothed-l1 solution; enable refine to continue the
    /// solve with a shrinking delta down to delta_min, which recovers an
    /// exact l1 minimizer.
    double delta = 1e-2;
    bool refine = false;
    double delta_min = 1e-9;
    double tol = 1e-10;
    int max_iter = 10000;
    /// Subgradient mode: diminishing steps tau0/sqrt(t).
    double tau0 = 0.05;
    int subgradient_iters = 20000;
};

namespace detail {

inline Eigen::VectorXd irls_l1(const Eigen::VectorXd& b, const Eigen::MatrixXd& a,
                               double delta, double tol, int max_iter,
                               Eigen::VectorXd x, bool* converged, int* iters) {
    for (int t = 0; t < max_iter; ++t) {
        const Eigen::VectorXd r = b - a * x;
        const Eigen::VectorXd w =
            (r.array().square() + delta * delta).sqrt().inverse();
        const Eigen::MatrixXd l = weighted_laplacian(a, w);
        Eigen::VectorXd next = pinv_laplacian(l) * (a.transpose() * (w.asDiagonal() * b));
        const double sc = relative_step(next, x);
        x = std::move(next);
        ++*iters;
        if (sc < tol) {
            *converged = true;
            return x;
        }
    }
    *converged = false;
    return x;
}

}  // namespace detail

inline EstimateResult lae(const Eigen::VectorXd& b, const Eigen::MatrixXd& a,
                          const LaeConfig& config = {},
                          const Eigen::VectorXd* x_true = nullptr) {
    if (b.size() != a.rows())
        throw std::invalid_argument("lae: |b| != |E|");
    if (kernel_dimension(a.transpose() * a) != 1)
        throw std::invalid_argument("lae: graph is not connected");
    EstimateResult res;
    res.iterations = 0;
    if (config.mode == LaeConfig::Mode::irls) {
        bool conv = false;
        Eigen::VectorXd x = detail::irls_l1(b, a, config.delta, config.tol,
                                            config.max_iter,
                                            Eigen::VectorXd::Zero(a.cols()),
                                            &conv, &res.iterations);
        if (config.refine) {
            for (double d = config.delta / 10.0; d >= config.delta_min; d /= 10.0)
                x = detail::irls_l1(b, a, d, config.tol, config.max_iter,
                                    std::move(x), &conv, &res.iterations);
        }
        res.converged = conv;
        res.x_hat = std::move(x);
    } else {
        // x <- x + tau_t A' sgn(b - Ax) with tau_t = tau0/sqrt(t);
        // returns the best l1 iterate seen.
        Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
        Eigen::VectorXd best = x;
        double best_obj = b.lpNorm<1>();
        for (int t = 1; t <= config.subgradient_iters; ++t) {
            const Eigen::VectorXd sgn =
                (b - a * x).array().sign().matrix();
            x += (config.tau0 / std::sqrt(static_cast<double>(t))) *
                 (a.transpose() * sgn);
            const double obj = (b - a * x).lpNorm<1>();
            if (obj < best_obj) {
                best_obj = obj;
                best = x;
            }
            if (x_true) {
                IterationRecord rec;
                rec.iter = t;
                rec.objective = obj;
                rec.nqe = nqe(x, *x_true);
                res.trace.push_back(rec);
            }
        }
        res.iterations = config.subgradient_iters;
        res.converged = true;
        res.x_hat = mean_centered(best);
    }
    return res;
}

}  // namespace relest
