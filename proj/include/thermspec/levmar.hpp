#pragma once

#include <functional>

#include <Eigen/Dense>

namespace thermspec {

/// Fills the residual vector r(p) and, when requested, the Jacobian
/// dr_i/dp_j. Sizes are fixed by the first call.
using ResidualFn =
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac)>;

struct LevMarOptions {
    int max_iterations = 300;
    double ftol = 1e-14;  // relative cost decrease
    double xtol = 1e-13;  // relative step size
    double gtol = 1e-12;  // scaled gradient norm
    double lambda0 = 1e-3;
};

struct LevMarResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance; // (J^T J)^{-1}, unscaled by residual variance
    double cost = 0.0;          // 0.5 * |r|^2
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
};

/// Damped least squares with multiplicative lambda control on the
/// diagonal-scaled normal equations.
LevMarResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p0,
                                 const LevMarOptions& opt = {});

} // namespace thermspec
