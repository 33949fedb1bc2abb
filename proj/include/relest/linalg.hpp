#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace relest {

/// L_W = A' diag(w) A for strictly positive edge weights w.
inline Eigen::MatrixXd weighted_laplacian(const Eigen::MatrixXd& a,
                                          const Eigen::VectorXd& w) {
    if (w.size() != a.rows())
        throw std::invalid_argument("weighted_laplacian: |w| != |E|");
    if ((w.array() <= 0.0).any())
        throw std::invalid_argument("weighted_laplacian: weights must be positive");
    return a.transpose() * w.asDiagonal() * a;
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix via
/// eigendecomposition, dropping eigenvalues below 1e-12 * lambda_max.
inline Eigen::MatrixXd pinv_laplacian(const Eigen::MatrixXd& l) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("pinv_laplacian: eigensolver failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double lmax = ev.cwiseAbs().maxCoeff();
    const double cutoff = 1e-12 * std::max(lmax, 1.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > cutoff) inv(i) = 1.0 / ev(i);
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// Largest singular value of A.
inline double spectral_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues()(0);
}

/// Number of eigenvalues of a symmetric PSD matrix at or below
/// rel_tol * lambda_max. At least 1 for any Laplacian.
inline int kernel_dimension(const Eigen::MatrixXd& l, double rel_tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("kernel_dimension: eigensolver failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double lmax = ev.cwiseAbs().maxCoeff();
    int dim = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) <= rel_tol * lmax) ++dim;
    return std::max(dim, 1);
}

/// Subtract the mean from v (the estimation problem is defined on the
/// mean-zero subspace).
inline Eigen::VectorXd mean_centered(const Eigen::VectorXd& v) {
    return v.array() - v.mean();
}

}  // namespace relest
