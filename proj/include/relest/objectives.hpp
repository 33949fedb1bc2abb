#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace relest {

/// Numerically stable logistic 1/(1+exp(-t)).
inline double stable_logistic(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

/// Probability that an edge with the given residual belongs to the
/// wide (beta) mixture component. Evaluated as a logistic of the
/// log-odds so it stays finite for residuals up to 1e6 and alpha down
/// to 1e-6; naive exponentials underflow at these scales.
inline double posterior(double residual, double alpha, double beta, double p) {
    if (alpha <= 0.0 || beta <= 0.0)
        throw std::invalid_argument("posterior: alpha and beta must be positive");
    if (p <= 0.0 || p >= 1.0)
        throw std::invalid_argument("posterior: p must be in (0,1)");
    const double log_odds = std::log(p) + std::log(alpha) - std::log1p(-p) -
                            std::log(beta) +
                            0.5 * residual * residual *
                                (1.0 / (alpha * alpha) - 1.0 / (beta * beta));
    return stable_logistic(log_odds);
}

inline Eigen::VectorXd posterior(const Eigen::VectorXd& residuals, double alpha,
                                 double beta, double p) {
    Eigen::VectorXd out(residuals.size());
    for (Eigen::Index e = 0; e < residuals.size(); ++e)
        out(e) = posterior(residuals(e), alpha, beta, p);
    return out;
}

/// Binary entropy in nats, extended by continuity with H(0) = H(1) = 0.
inline double entropy(double xi) {
    if (xi < 0.0 || xi > 1.0)
        throw std::invalid_argument("entropy: argument outside [0,1]");
    if (xi == 0.0 || xi == 1.0) return 0.0;
    return -xi * std::log(xi) - (1.0 - xi) * std::log(1.0 - xi);
}

/// Mixture log-likelihood of the measurements at (x, alpha, beta):
/// sum over edges of the log two-component Gaussian density of the
/// residual, evaluated in the log domain.
inline double log_likelihood(const Eigen::VectorXd& x, double alpha, double beta,
                             const Eigen::VectorXd& b, const Eigen::MatrixXd& a,
                             double p) {
    if (alpha <= 0.0 || beta <= 0.0)
        throw std::invalid_argument("log_likelihood: alpha, beta must be positive");
    if (x.size() != a.cols() || b.size() != a.rows())
        throw std::invalid_argument("log_likelihood: dimension mismatch");
    static const double half_log_2pi = 0.5 * std::log(2.0 * M_PI);
    const Eigen::VectorXd r = b - a * x;
    double total = 0.0;
    for (Eigen::Index e = 0; e < r.size(); ++e) {
        const double r2 = r(e) * r(e);
        const double la = std::log1p(-p) - std::log(alpha) - half_log_2pi -
                          0.5 * r2 / (alpha * alpha);
        const double lb = std::log(p) - std::log(beta) - half_log_2pi -
                          0.5 * r2 / (beta * beta);
        const double m = std::max(la, lb);
        total += m + std::log(std::exp(la - m) + std::exp(lb - m));
    }
    return total;
}

/// objective_v evaluated directly on precomputed residuals.
inline double objective_v_residuals(const Eigen::VectorXd& r,
                                    const Eigen::VectorXd& pi, double alpha,
                                    double beta, double p) {
    if (alpha <= 0.0 || beta <= 0.0)
        throw std::invalid_argument("objective_v: alpha, beta must be positive");
    if (pi.size() != r.size())
        throw std::invalid_argument("objective_v: dimension mismatch");
    const double log_p_beta = std::log(p) - std::log(beta);
    const double log_q_alpha = std::log1p(-p) - std::log(alpha);
    double total = 0.0;
    for (Eigen::Index e = 0; e < r.size(); ++e) {
        const double quad = 0.5 * r(e) * r(e) *
                            ((1.0 - pi(e)) / (alpha * alpha) + pi(e) / (beta * beta));
        total += quad - pi(e) * log_p_beta - (1.0 - pi(e)) * log_q_alpha -
                 entropy(pi(e));
    }
    return total;
}

/// Quadratic-plus-entropy objective whose minimum over the soft labels
/// recovers the negative log-likelihood up to the |E|/2 log(2 pi) constant.
inline double objective_v(const Eigen::VectorXd& x, const Eigen::VectorXd& pi,
                          double alpha, double beta, const Eigen::VectorXd& b,
                          const Eigen::MatrixXd& a, double p) {
    if (x.size() != a.cols() || b.size() != a.rows())
        throw std::invalid_argument("objective_v: dimension mismatch");
    return objective_v_residuals(b - a * x, pi, alpha, beta, p);
}

/// objective_v with the epsilon/|E| regularization added to every squared
/// residual; reduces to objective_v at epsilon = 0.
inline double objective_v_tilde(const Eigen::VectorXd& x, const Eigen::VectorXd& pi,
                                double alpha, double beta, double epsilon,
                                const Eigen::VectorXd& b, const Eigen::MatrixXd& a,
                                double p) {
    if (epsilon < 0.0)
        throw std::invalid_argument("objective_v_tilde: epsilon must be >= 0");
    if (x.size() != a.cols() || b.size() != a.rows() || pi.size() != a.rows())
        throw std::invalid_argument("objective_v_tilde: dimension mismatch");
    const double base = objective_v(x, pi, alpha, beta, b, a, p);
    const double eps_term =
        0.5 * (epsilon / static_cast<double>(b.size())) *
        ((1.0 - pi.array()) / (alpha * alpha) + pi.array() / (beta * beta)).sum();
    return base + eps_term;
}

/// Zero the s smallest entries of xi. Ties broken by edge index: among
/// equal values the lowest index is zeroed first. Idempotent for fixed s.
inline Eigen::VectorXd project_smallest(const Eigen::VectorXd& xi, int s) {
    const int m = static_cast<int>(xi.size());
    if (s < 0 || s > m)
        throw std::invalid_argument("project_smallest: s out of range");
    std::vector<int> order(static_cast<size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&xi](int i, int j) { return xi(i) < xi(j); });
    Eigen::VectorXd out = xi;
    for (int k = 0; k < s; ++k) out(order[static_cast<size_t>(k)]) = 0.0;
    return out;
}

}  // namespace relest
