#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace subart {

/// Least-squares fit of one or two outcome equations on a shared design.
/// Coefficients include the intercept in position 0, then the design columns
/// in order.
struct LinearFit {
  Eigen::MatrixXd coefficients;    // (p+1) x n_eq
  Eigen::MatrixXd residual_cov;    // n_eq x n_eq, n - p - 1 denominator
};

/// OLS via column-pivoted QR. Throws on rank deficiency, naming the columns
/// past the numerical rank. column_names, when given, must match X's columns
/// (intercept is implicit).
LinearFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const std::vector<std::string>& column_names = {});

/// SUR with shared regressors: per-equation OLS is the exact GLS solution,
/// so the fit is equation-wise least squares plus the cross-equation
/// residual covariance. Outcomes must be complete.
LinearFit fit_sur(const Eigen::MatrixXd& X, const Eigen::MatrixX2d& Y,
                  const std::vector<std::string>& column_names = {});

}  // namespace subart
