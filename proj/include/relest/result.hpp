#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relest {

/// One row of an iteration trace.
struct IterationRecord {
    int iter = 0;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double step_norm = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    int kappa = 0;
    double nqe = std::numeric_limits<double>::quiet_NaN();
};

/// How well the terminal state satisfies the algorithm's stationarity
/// equations. x_resolve is the substantive check: relative distance
/// between the returned estimate and a fresh WLS solve at the final
/// weights. The *_update entries re-evaluate each update equation at the
/// inputs the algorithm actually used (catches ordering/staleness bugs);
/// the *_strict entries re-evaluate at the terminal parameters, where the
/// epsilon-regularization drift shows up, and are reported as diagnostics.
struct FixedPointResiduals {
    double x_resolve = 0.0;
    double x_gradient = 0.0;    // ||L_W x - A'W b||, distributed mode only
    double weights_update = 0.0;
    double pi_update = 0.0;
    double alpha_update = 0.0;
    double beta_update = 0.0;
    double pi_strict = 0.0;
    double alpha_strict = 0.0;
    double beta_strict = 0.0;
};

/// Output of every estimator. x_hat is always mean-zero; pi and the
/// mixture parameter estimates are present only where the algorithm
/// produces them.
struct EstimateResult {
    Eigen::VectorXd x_hat;
    std::optional<Eigen::VectorXd> pi;
    std::optional<double> alpha_hat;
    std::optional<double> beta_hat;
    int iterations = 0;
    bool converged = true;
    std::vector<IterationRecord> trace;
    FixedPointResiduals fixed_point;
    std::string diagnostics;
};

inline double relative_step(const Eigen::VectorXd& next,
                            const Eigen::VectorXd& prev) {
    return (next - prev).norm() / std::max(prev.norm(), 1e-30);
}

}  // namespace relest
