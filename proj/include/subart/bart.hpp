#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "subart/dataset.hpp"

namespace subart {

/// Sampler settings shared by the univariate and bivariate models.
/// Defaults follow the guided-example listings (100 trees, 5000 sweeps,
/// 1000 burn-in); hyperprior defaults are the canonical BART choices.
struct BartConfig {
  int n_tree = 100;
  int n_mcmc = 5000;
  int n_burn = 1000;
  double leaf_shrinkage_k = 2.0;  // leaf prior sd = 0.5/(k sqrt(m)) on the scaled outcome
  double depth_alpha = 0.95;
  double depth_beta = 2.0;
  double error_nu = 3.0;          // sigma^2 prior df
  double error_quantile = 0.90;   // data sd placed at this prior quantile
  std::uint64_t seed = 0;

  int n_kept() const { return n_mcmc - n_burn; }
  void validate() const;
};

/// Kept post-burn-in draws of a univariate fit. For the probit variant the
/// stored values are latent-scale ensemble fits and sigma2_draws is empty.
struct BartPosterior {
  Eigen::MatrixXd y_hat_train;    // n x n_kept
  Eigen::MatrixXd y_hat_test;     // n_test x n_kept
  std::vector<double> sigma2_draws;
  double accept_rate = 0.0;       // fraction of tree proposals accepted

  int n_kept() const { return static_cast<int>(y_hat_train.cols()); }
  Eigen::VectorXd train_mean() const { return y_hat_train.rowwise().mean(); }
  Eigen::VectorXd test_mean() const { return y_hat_test.rowwise().mean(); }
};

/// Gaussian-likelihood BART for a continuous outcome. X_test may have zero
/// rows when no out-of-sample predictions are needed.
BartPosterior fit_bart(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::MatrixXd& X_test, const BartConfig& config);

/// Probit BART via truncated-normal latent augmentation; sigma^2 fixed at 1.
BartPosterior fit_probit_bart(const Eigen::MatrixXd& X,
                              const std::vector<int>& t,
                              const BartConfig& config);

/// Posterior-mean propensity scores: mean over draws of Phi(latent fit).
std::vector<double> estimate_ps(const BartPosterior& posterior);

}  // namespace subart
