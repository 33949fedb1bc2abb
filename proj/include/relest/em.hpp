#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "relest/linalg.hpp"
#include "relest/metrics.hpp"
#include "relest/objectives.hpp"
#include "relest/result.hpp"

namespace relest {

struct LsEmConfig {
    double p = 0.1;
    int s = -1;  // -1: use N-1
    double c1 = 1.0;
    double c2 = 1.0;
    double alpha0 = 0.3;
    double beta0 = 0.6;
    double tol = 1e-4;
    int max_iter = 500;
};

struct DistEmConfig {
    double p = 0.1;
    double alpha = 0.05;
    double beta = 0.25;
    double tau = -1.0;  // -1: use 0.9 * alpha^2 / ||A||^2
    double tol = 1e-4;
    int max_iter = 5000;
};

namespace detail {

struct EigPinv {
    Eigen::MatrixXd pinv;
    int kappa = 1;
};

// One eigendecomposition serving both the pseudo-inverse (cutoff
// 1e-12 lambda_max) and the kernel dimension (cutoff 1e-10 lambda_max).
inline EigPinv eig_pinv(const Eigen::MatrixXd& l) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eig_pinv: eigensolver failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double lmax = ev.cwiseAbs().maxCoeff();
    const double pinv_cut = 1e-12 * std::max(lmax, 1.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    EigPinv out;
    out.kappa = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > pinv_cut) inv(i) = 1.0 / ev(i);
        if (ev(i) <= 1e-10 * lmax) ++out.kappa;
    }
    out.kappa = std::max(out.kappa, 1);
    out.pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    return out;
}

inline Eigen::VectorXd em_weights(const Eigen::VectorXd& pi, double alpha,
                                  double beta) {
    return ((1.0 - pi.array()) / (alpha * alpha) + pi.array() / (beta * beta))
        .matrix();
}

// Endpoint index extracted once from a {0, +1, -1} incidence matrix so the
// per-iteration work is O(|E|).
struct EdgeEndpoints {
    std::vector<int> from;
    std::vector<int> to;
};

inline EdgeEndpoints index_incidence(const Eigen::MatrixXd& a) {
    EdgeEndpoints idx;
    idx.from.resize(static_cast<size_t>(a.rows()), -1);
    idx.to.resize(static_cast<size_t>(a.rows()), -1);
    for (Eigen::Index e = 0; e < a.rows(); ++e) {
        for (Eigen::Index n = 0; n < a.cols(); ++n) {
            if (a(e, n) == 1.0 && idx.to[static_cast<size_t>(e)] < 0)
                idx.to[static_cast<size_t>(e)] = static_cast<int>(n);
            else if (a(e, n) == -1.0 && idx.from[static_cast<size_t>(e)] < 0)
                idx.from[static_cast<size_t>(e)] = static_cast<int>(n);
            else if (a(e, n) != 0.0)
                throw std::invalid_argument(
                    "index_incidence: row is not a signed incidence row");
        }
        if (idx.from[static_cast<size_t>(e)] < 0 || idx.to[static_cast<size_t>(e)] < 0)
            throw std::invalid_argument(
                "index_incidence: row is not a signed incidence row");
    }
    return idx;
}

inline Eigen::VectorXd edge_residuals(const EdgeEndpoints& idx,
                                      const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& b) {
    Eigen::VectorXd r(b.size());
    for (Eigen::Index e = 0; e < b.size(); ++e)
        r(e) = b(e) - (x(idx.to[static_cast<size_t>(e)]) -
                       x(idx.from[static_cast<size_t>(e)]));
    return r;
}

// Gradient accumulated per edge in index order; the node-level simulation
// sums incident edges in the same order, so the two match bit for bit.
inline Eigen::VectorXd weighted_gradient(const EdgeEndpoints& idx, int n_nodes,
                                         const Eigen::VectorXd& w,
                                         const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& b) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n_nodes);
    for (Eigen::Index e = 0; e < b.size(); ++e) {
        const int from = idx.from[static_cast<size_t>(e)];
        const int to = idx.to[static_cast<size_t>(e)];
        const double term = w(e) * ((x(to) - x(from)) - b(e));
        grad(to) += term;
        grad(from) -= term;
    }
    return grad;
}

}  // namespace detail

/// Centralized LS-EM: alternating weighted least squares, posterior
/// soft labels, projection keeping at least s reliable edges, and
/// epsilon-regularized re-estimation of the mixture parameters. Runs the
/// printed loop verbatim; the parameter re-estimation uses the epsilon
/// value from before the current shrink step.
inline EstimateResult ls_em(const Eigen::VectorXd& b, const Eigen::MatrixXd& a,
                            LsEmConfig config,
                            const Eigen::VectorXd* x_true = nullptr) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (b.size() != m) throw std::invalid_argument("ls_em: |b| != |E|");
    if (config.s < 0) config.s = n - 1;
    if (config.s < 1 || config.s > m)
        throw std::invalid_argument("ls_em: s must be in [1, |E|]");
    if (!(config.p > 0.0 && config.p < 0.5))
        throw std::invalid_argument("ls_em: p must be in (0, 1/2)");
    if (!(config.alpha0 > 0.0 && config.alpha0 < config.beta0))
        throw std::invalid_argument("ls_em: need 0 < alpha0 < beta0");
    if (!(config.c1 > 0.0 && config.c2 > 0.0))
        throw std::invalid_argument("ls_em: c1, c2 must be positive");
    if (!(config.tol > 0.0) || config.max_iter < 1)
        throw std::invalid_argument("ls_em: bad tol/max_iter");
    if (kernel_dimension(a.transpose() * a) != 1)
        throw std::invalid_argument("ls_em: graph is not connected");

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(m);
    double alpha = config.alpha0;
    double beta = config.beta0;
    double eps = 1.0;
    // Values in effect when the terminal state was produced.
    double alpha_used = alpha, beta_used = beta, eps_used = eps;
    Eigen::VectorXd pi_used = pi;
    Eigen::VectorXd w_used;

    EstimateResult res;
    res.converged = false;
    res.trace.push_back(IterationRecord{
        0, objective_v_tilde(x, pi, alpha, beta, eps, b, a, config.p), 0.0,
        alpha, beta, eps, 0,
        x_true ? nqe(x, *x_true) : std::numeric_limits<double>::quiet_NaN()});

    for (int t = 0; t < config.max_iter; ++t) {
        const Eigen::VectorXd w = detail::em_weights(pi, alpha, beta);
        const detail::EigPinv ep = detail::eig_pinv(weighted_laplacian(a, w));
        const Eigen::VectorXd x_next =
            ep.pinv * (a.transpose() * (w.asDiagonal() * b));
        const Eigen::VectorXd r = b - a * x_next;
        const Eigen::VectorXd xi = posterior(r, alpha, beta, config.p);
        const Eigen::VectorXd pi_next = project_smallest(xi, config.s);
        const double step = (x_next - x).norm();
        const double theta =
            (t == 0 ? std::numeric_limits<double>::infinity()
                    : 1.0 / std::log(static_cast<double>(t) + 1.0)) +
            config.c1 * step + config.c2 * static_cast<double>(ep.kappa - 1);
        const double eps_next = std::min(eps, theta);
        const double sum_good = (1.0 - pi_next.array()).sum();
        const double sum_bad = pi_next.sum();
        const double alpha_next = std::sqrt(
            (eps + ((1.0 - pi_next.array()) * r.array().square()).sum()) /
            sum_good);
        const double beta_next = std::sqrt(
            (eps + (pi_next.array() * r.array().square()).sum()) / sum_bad);
        const double sc = step / std::max(x.norm(), 1e-30);

        if (!(beta_next < 1e8) || sum_bad < 1e-12) {
            res.diagnostics = "mixture collapse: beta_hat=" +
                              std::to_string(beta_next) +
                              " ||pi||_1=" + std::to_string(sum_bad);
            res.iterations = t + 1;
            break;
        }

        alpha_used = alpha;
        beta_used = beta;
        eps_used = eps;
        pi_used = pi;
        w_used = w;
        x = x_next;
        pi = pi_next;
        alpha = alpha_next;
        beta = beta_next;
        eps = eps_next;
        res.iterations = t + 1;
        res.trace.push_back(IterationRecord{
            t + 1, objective_v_tilde(x, pi, alpha, beta, eps, b, a, config.p),
            step, alpha, beta, eps, ep.kappa,
            x_true ? nqe(x, *x_true) : std::numeric_limits<double>::quiet_NaN()});
        if (sc < config.tol) {
            res.converged = true;
            break;
        }
    }

    // Stationarity report. x_resolve re-solves the WLS problem at the
    // terminal weights; the *_update entries re-evaluate each update at
    // the inputs it consumed; the *_strict entries use the terminal
    // parameters, where the epsilon drift is visible.
    {
        const Eigen::VectorXd w_final = detail::em_weights(pi, alpha, beta);
        const detail::EigPinv ep = detail::eig_pinv(weighted_laplacian(a, w_final));
        const Eigen::VectorXd x_resolved =
            ep.pinv * (a.transpose() * (w_final.asDiagonal() * b));
        res.fixed_point.x_resolve =
            (x - x_resolved).norm() / std::max(x.norm(), 1e-30);
        if (w_used.size() == pi.size()) {
            res.fixed_point.weights_update =
                (w_used - detail::em_weights(pi_used, alpha_used, beta_used))
                    .cwiseAbs()
                    .maxCoeff();
        }
        const Eigen::VectorXd r = b - a * x;
        const Eigen::VectorXd pi_used_eval =
            project_smallest(posterior(r, alpha_used, beta_used, config.p),
                             config.s);
        res.fixed_point.pi_update = (pi - pi_used_eval).cwiseAbs().maxCoeff();
        const Eigen::VectorXd pi_strict_eval =
            project_smallest(posterior(r, alpha, beta, config.p), config.s);
        res.fixed_point.pi_strict = (pi - pi_strict_eval).cwiseAbs().maxCoeff();
        const double sum_good = (1.0 - pi.array()).sum();
        const double sum_bad = pi.sum();
        const double alpha_used_eval = std::sqrt(
            (eps_used + ((1.0 - pi.array()) * r.array().square()).sum()) /
            sum_good);
        const double beta_used_eval =
            std::sqrt((eps_used + (pi.array() * r.array().square()).sum()) /
                      sum_bad);
        res.fixed_point.alpha_update = std::abs(alpha - alpha_used_eval) / alpha;
        res.fixed_point.beta_update = std::abs(beta - beta_used_eval) / beta;
        const double alpha_strict_eval = std::sqrt(
            (eps + ((1.0 - pi.array()) * r.array().square()).sum()) / sum_good);
        const double beta_strict_eval = std::sqrt(
            (eps + (pi.array() * r.array().square()).sum()) / sum_bad);
        res.fixed_point.alpha_strict = std::abs(alpha - alpha_strict_eval) / alpha;
        res.fixed_point.beta_strict = std::abs(beta - beta_strict_eval) / beta;
    }

    res.x_hat = std::move(x);
    res.pi = std::move(pi);
    res.alpha_hat = alpha;
    res.beta_hat = beta;
    return res;
}

/// Largest admissible step size for dist_ls_em on incidence matrix A:
/// the weights are bounded by 1/alpha^2, so tau must stay below
/// alpha^2/||A||^2 for the descent argument to hold.
inline double dist_em_tau_bound(const Eigen::MatrixXd& a, double alpha) {
    const double na = spectral_norm(a);
    return alpha * alpha / (na * na);
}

/// Distributed LS-EM: one weighted gradient step and a posterior update
/// per iteration, mixture parameters fixed. Matrix-form reference
/// implementation of the per-node protocol in simnet.hpp.
inline EstimateResult dist_ls_em(const Eigen::VectorXd& b,
                                 const Eigen::MatrixXd& a, DistEmConfig config,
                                 const Eigen::VectorXd* x_true = nullptr,
                                 int fixed_rounds = -1) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (b.size() != m) throw std::invalid_argument("dist_ls_em: |b| != |E|");
    if (!(config.alpha > 0.0 && config.alpha < config.beta))
        throw std::invalid_argument("dist_ls_em: need 0 < alpha < beta");
    if (!(config.p > 0.0 && config.p < 0.5))
        throw std::invalid_argument("dist_ls_em: p must be in (0, 1/2)");
    const double bound = dist_em_tau_bound(a, config.alpha);
    if (config.tau < 0.0) config.tau = 0.9 * bound;
    if (!(config.tau > 0.0 && config.tau < bound))
        throw std::invalid_argument(
            "dist_ls_em: tau violates the convergence bound tau < alpha^2/||A||^2");
    if (!(config.tol > 0.0) || config.max_iter < 1)
        throw std::invalid_argument("dist_ls_em: bad tol/max_iter");

    const detail::EdgeEndpoints idx = detail::index_incidence(a);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(m);
    EstimateResult res;
    res.converged = false;
    res.trace.push_back(IterationRecord{
        0,
        objective_v_residuals(detail::edge_residuals(idx, x, b), pi,
                              config.alpha, config.beta, config.p),
        0.0, config.alpha, config.beta,
        std::numeric_limits<double>::quiet_NaN(), 0,
        x_true ? nqe(x, *x_true) : std::numeric_limits<double>::quiet_NaN()});

    const int horizon = fixed_rounds > 0 ? fixed_rounds : config.max_iter;
    for (int t = 0; t < horizon; ++t) {
        const Eigen::VectorXd w = detail::em_weights(pi, config.alpha, config.beta);
        const Eigen::VectorXd grad = detail::weighted_gradient(idx, n, w, x, b);
        const Eigen::VectorXd x_next = x - config.tau * grad;
        const Eigen::VectorXd r_next = detail::edge_residuals(idx, x_next, b);
        const Eigen::VectorXd pi_next =
            posterior(r_next, config.alpha, config.beta, config.p);
        const double step = (x_next - x).norm();
        const double sc = step / std::max(x.norm(), 1e-30);
        x = x_next;
        pi = pi_next;
        res.iterations = t + 1;
        res.trace.push_back(IterationRecord{
            t + 1,
            objective_v_residuals(r_next, pi, config.alpha, config.beta,
                                  config.p),
            step, config.alpha, config.beta,
            std::numeric_limits<double>::quiet_NaN(), 0,
            x_true ? nqe(x, *x_true) : std::numeric_limits<double>::quiet_NaN()});
        if (fixed_rounds < 0 && sc < config.tol) {
            res.converged = true;
            break;
        }
    }
    if (fixed_rounds > 0) res.converged = true;

    const Eigen::VectorXd w_final =
        detail::em_weights(pi, config.alpha, config.beta);
    const Eigen::MatrixXd l_final = weighted_laplacian(a, w_final);
    const Eigen::VectorXd atwb = a.transpose() * (w_final.asDiagonal() * b);
    res.fixed_point.x_gradient = (l_final * x - atwb).norm();
    res.fixed_point.x_resolve =
        (x - pinv_laplacian(l_final) * atwb).norm() / std::max(x.norm(), 1e-30);
    const Eigen::VectorXd pi_eval =
        posterior(b - a * x, config.alpha, config.beta, config.p);
    res.fixed_point.pi_update = (pi - pi_eval).cwiseAbs().maxCoeff();
    res.fixed_point.pi_strict = res.fixed_point.pi_update;

    res.x_hat = std::move(x);
    res.pi = std::move(pi);
    return res;
}

}  // namespace relest
