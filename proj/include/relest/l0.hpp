#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace relest {

namespace detail {

// Phase-1 dense simplex feasibility test for {M z = d, z >= 0} with
// Bland's rule. Returns true iff the system is feasible. Problem sizes
// here are tiny (tens of rows/columns), so no effort is spent on
// factorization reuse.
inline bool simplex_feasible(Eigen::MatrixXd m, Eigen::VectorXd d,
                             double tol = 1e-9) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    for (int i = 0; i < rows; ++i) {
        if (d(i) < 0.0) {
            d(i) = -d(i);
            m.row(i) = -m.row(i);
        }
    }
    // Tableau with one artificial per row.
    Eigen::MatrixXd tab(rows, cols + rows);
    tab.leftCols(cols) = m;
    tab.rightCols(rows) = Eigen::MatrixXd::Identity(rows, rows);
    Eigen::VectorXd rhs = d;
    std::vector<int> basis(static_cast<size_t>(rows));
    for (int i = 0; i < rows; ++i) basis[static_cast<size_t>(i)] = cols + i;
    // Phase-1 cost: sum of artificials; reduced costs start as the
    // negated column sums over all rows (artificial basis).
    Eigen::VectorXd reduced = Eigen::VectorXd::Zero(cols + rows);
    reduced.head(cols) = -tab.leftCols(cols).colwise().sum();
    double objective = -rhs.sum();

    const int max_pivots = 50 * (rows + cols + 1);
    for (int pivot_count = 0; pivot_count < max_pivots; ++pivot_count) {
        int enter = -1;
        for (int j = 0; j < cols + rows; ++j) {
            if (reduced(j) < -tol) {
                enter = j;
                break;  // Bland: lowest index
            }
        }
        if (enter < 0) break;
        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < rows; ++i) {
            if (tab(i, enter) > tol) {
                const double ratio = rhs(i) / tab(i, enter);
                if (leave < 0 || ratio < best_ratio - tol ||
                    (ratio < best_ratio + tol &&
                     basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
        }
        if (leave < 0) break;  // unbounded column: cannot happen in phase 1
        const double pivot = tab(leave, enter);
        tab.row(leave) /= pivot;
        rhs(leave) /= pivot;
        for (int i = 0; i < rows; ++i) {
            if (i != leave && std::abs(tab(i, enter)) > 0.0) {
                const double f = tab(i, enter);
                tab.row(i) -= f * tab.row(leave);
                rhs(i) -= f * rhs(leave);
            }
        }
        const double fr = reduced(enter);
        reduced -= fr * tab.row(leave).transpose();
        objective -= fr * rhs(leave);
        basis[static_cast<size_t>(leave)] = enter;
    }
    return -objective <= tol * std::max(1.0, d.lpNorm<1>());
}

// Is there a mean-zero x with |b_e - (Ax)_e| <= cap_e for all e?
// Encoded as equalities with slack and split sign variables.
inline bool interval_feasible(const Eigen::VectorXd& b, const Eigen::MatrixXd& a,
                              const Eigen::VectorXd& cap) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    // Columns: x+ (n), x- (n), slack (2m). Rows: 2m inequalities + mean-zero.
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(2 * m + 1, 2 * n + 2 * m);
    Eigen::VectorXd rhs(2 * m + 1);
    for (int e = 0; e < m; ++e) {
        // b_e - A_e x <= cap_e  ->  -A_e x + s = cap_e - b_e
        mat.block(e, 0, 1, n) = -a.row(e);
        mat.block(e, n, 1, n) = a.row(e);
        mat(e, 2 * n + e) = 1.0;
        rhs(e) = cap(e) - b(e);
        // A_e x - b_e <= cap_e  ->  A_e x + s = cap_e + b_e
        mat.block(m + e, 0, 1, n) = a.row(e);
        mat.block(m + e, n, 1, n) = -a.row(e);
        mat(m + e, 2 * n + m + e) = 1.0;
        rhs(m + e) = cap(e) + b(e);
    }
    mat.block(2 * m, 0, 1, n).setOnes();
    mat.block(2 * m, n, 1, n).setConstant(-1.0);
    rhs(2 * m) = 0.0;
    return simplex_feasible(std::move(mat), std::move(rhs));
}

}  // namespace detail

/// Result of the exhaustive minimum-support outlier search.
struct L0Result {
    Eigen::VectorXi z;
    int support = 0;
};

/// Brute-force solution of the smallest-outlier-set problem: enumerate
/// z in increasing support size and return the first labeling for which
/// some mean-zero x satisfies |b_e - (Ax)_e| <= 3 alpha + 3 z_e (beta - alpha)
/// for every edge. Exhaustive, so restricted to |E| <= 20.
inline L0Result l0_oracle(const Eigen::VectorXd& b, const Eigen::MatrixXd& a,
                          double alpha, double beta) {
    const int m = static_cast<int>(a.rows());
    if (m > 20)
        throw std::invalid_argument("l0_oracle: instance too large (|E| > 20)");
    if (!(alpha > 0.0 && beta > alpha))
        throw std::invalid_argument("l0_oracle: need 0 < alpha < beta");
    const double good_cap = 3.0 * alpha;
    const double bad_cap = 3.0 * beta;
    Eigen::VectorXd cap(m);
    for (int k = 0; k <= m; ++k) {
        // All supports of size k in lexicographic order.
        std::vector<int> comb(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) comb[static_cast<size_t>(i)] = i;
        while (true) {
            cap.setConstant(good_cap);
            for (int idx : comb) cap(idx) = bad_cap;
            if (detail::interval_feasible(b, a, cap)) {
                L0Result res;
                res.z = Eigen::VectorXi::Zero(m);
                for (int idx : comb) res.z(idx) = 1;
                res.support = k;
                return res;
            }
            // next combination
            int i = k - 1;
            while (i >= 0 && comb[static_cast<size_t>(i)] == m - k + i) --i;
            if (i < 0) break;
            ++comb[static_cast<size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
        }
    }
    throw std::runtime_error(
        "l0_oracle: infeasible even with every edge labeled bad");
}

}  // namespace relest
