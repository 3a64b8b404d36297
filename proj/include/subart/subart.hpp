#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "subart/bart.hpp"
#include "subart/rng.hpp"

namespace subart {

/// Inverse-Wishart prior on the 2x2 error covariance.
struct SigmaPrior {
  double df = 4.0;          // > 3 so the prior mean exists for 2x2
  Eigen::Matrix2d scale = Eigen::Matrix2d::Identity();
};

struct SubartConfig {
  BartConfig base;
  double sigma_df = 4.0;
  /// Diagnostic mode: zero the off-diagonal of every Sigma draw, decoupling
  /// the two equations. Used by the reduction-to-univariate checks.
  bool diagonal_sigma = false;
};

/// Kept draws of the bivariate fit, all in original outcome units.
struct SubartPosterior {
  Eigen::MatrixXd y_hat_train_cost;    // n x n_kept
  Eigen::MatrixXd y_hat_train_health;
  Eigen::MatrixXd y_hat_test_cost;     // n_test x n_kept
  Eigen::MatrixXd y_hat_test_health;
  std::vector<Eigen::Matrix2d> sigma_draws;
  /// Working outcome matrix after the final sweep, original units. Observed
  /// cells are unchanged input; masked cells hold their last imputation.
  Eigen::MatrixX2d y_augmented;
  double accept_rate = 0.0;

  int n_kept() const { return static_cast<int>(y_hat_train_cost.cols()); }
};

/// Draw from the inverse-Wishart full conditional of Sigma given bivariate
/// residuals: IW(prior.df + n, prior.scale + R^T R).
Eigen::Matrix2d sample_sigma(const Eigen::MatrixX2d& residuals,
                             const SigmaPrior& prior, Rng& rng);

/// Draw from InverseWishart(df, scale) directly (n = 0 case).
Eigen::Matrix2d sample_inverse_wishart(double df, const Eigen::Matrix2d& scale,
                                       Rng& rng);

/// Fit the bivariate correlated-error model. Y is n x 2 (cost, health) with
/// missing cells flagged in `missing`; masked cells are imputed by data
/// augmentation each sweep and never read.
SubartPosterior fit_subart(const Eigen::MatrixXd& X, const Eigen::MatrixX2d& Y,
                           const std::vector<std::array<bool, 2>>& missing,
                           const Eigen::MatrixXd& X_test,
                           const SubartConfig& config);

}  // namespace subart
