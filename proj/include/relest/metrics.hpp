#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relest/linalg.hpp"

namespace relest {

/// Normalized quadratic error in percent: 100 ||x_hat - x_true||^2 / ||x_true||^2.
/// Both arguments are mean-centered first; the estimation problem only
/// identifies x up to an additive constant.
inline double nqe(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_true) {
    if (x_hat.size() != x_true.size())
        throw std::invalid_argument("nqe: length mismatch");
    const Eigen::VectorXd xh = mean_centered(x_hat);
    const Eigen::VectorXd xt = mean_centered(x_true);
    const double denom = xt.squaredNorm();
    if (denom == 0.0) throw std::invalid_argument("nqe: ||x_true|| is zero");
    return 100.0 * (xh - xt).squaredNorm() / denom;
}

/// Fraction of edges whose thresholded label (pi_e > threshold) differs
/// from the true label. Values exactly at the threshold classify as good.
inline double misclassification(const Eigen::VectorXd& pi,
                                const Eigen::VectorXi& z_true,
                                double threshold = 0.5) {
    if (pi.size() != z_true.size())
        throw std::invalid_argument("misclassification: length mismatch");
    int wrong = 0;
    for (Eigen::Index e = 0; e < pi.size(); ++e)
        wrong += ((pi(e) > threshold ? 1 : 0) != z_true(e)) ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(pi.size());
}

/// Five-number-style summary used for the boxplot figures: quartiles by
/// linear interpolation, whiskers at the most extreme points within
/// 1.5 IQR of the quartiles, everything beyond listed as outliers.
struct Summary {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double mean = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<double> outliers;
};

namespace detail {

inline double percentile_linear(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

inline Summary summarize(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty input");
    std::sort(values.begin(), values.end());
    Summary s;
    s.q25 = detail::percentile_linear(values, 0.25);
    s.median = detail::percentile_linear(values, 0.50);
    s.q75 = detail::percentile_linear(values, 0.75);
    s.mean = 0.0;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    const double iqr = s.q75 - s.q25;
    const double lo_fence = s.q25 - 1.5 * iqr;
    const double hi_fence = s.q75 + 1.5 * iqr;
    s.whisker_low = values.back();
    s.whisker_high = values.front();
    for (double v : values) {
        if (v >= lo_fence && v <= hi_fence) {
            s.whisker_low = std::min(s.whisker_low, v);
            s.whisker_high = std::max(s.whisker_high, v);
        } else {
            s.outliers.push_back(v);
        }
    }
    return s;
}

/// One experiment trial for CSV emission.
struct TrialRecord {
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    std::string estimator;
    double nqe_percent = 0.0;
    int iterations = 0;
    bool converged = true;
    double misclassification_rate = -1.0;  // -1 when no labels were produced
    double runtime_seconds = 0.0;
};

}  // namespace relest
