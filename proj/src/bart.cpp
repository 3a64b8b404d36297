#include "subart/bart.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "subart/backfitting.hpp"
#include "subart/rng.hpp"

namespace subart {

void BartConfig::validate() const {
  if (n_tree < 1) throw std::invalid_argument("n_tree must be >= 1");
  if (n_burn >= n_mcmc)
    throw std::invalid_argument("n_burn must be smaller than n_mcmc");
  if (n_burn < 0) throw std::invalid_argument("n_burn must be >= 0");
  if (depth_alpha <= 0.0 || depth_alpha >= 1.0)
    throw std::invalid_argument("depth_alpha must be in (0,1)");
  if (depth_beta < 0.0) throw std::invalid_argument("depth_beta must be >= 0");
}

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite())
    throw std::invalid_argument(std::string(what) + " contains non-finite values");
}

// Scale factor for the sigma^2 prior nu*lambda/chi2_nu: lambda chosen so the
// sample sd sits at the requested prior quantile.
double sigma_prior_scale(double s2, double nu, double q) {
  boost::math::chi_squared_distribution<double> chi2(nu);
  return s2 * boost::math::quantile(chi2, 1.0 - q) / nu;
}

}  // namespace

BartPosterior fit_bart(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::MatrixXd& X_test,
                       const BartConfig& config) {
  config.validate();
  check_finite(X, "X");
  check_finite(y, "y");
  if (X_test.cols() > 0) check_finite(X_test, "X_test");
  const Eigen::Index n = X.rows();
  if (y.size() != n) throw std::invalid_argument("X/y row mismatch");
  if (n < 2) throw std::invalid_argument("need at least 2 observations");
  const double y_min = y.minCoeff();
  const double y_max = y.maxCoeff();
  if (y_min == y_max)
    throw std::invalid_argument("y is constant; outcome scaling is degenerate");

  // Rescale the outcome to [-0.5, 0.5].
  const double range = y_max - y_min;
  const Eigen::VectorXd ys = (y.array() - y_min) / range - 0.5;

  const double m = config.n_tree;
  const double leaf_sd = 0.5 / (config.leaf_shrinkage_k * std::sqrt(m));
  const double leaf_var = leaf_sd * leaf_sd;
  const double s2 = (ys.array() - ys.mean()).square().sum() /
                    static_cast<double>(n - 1);
  const double nu = config.error_nu;
  const double lambda = sigma_prior_scale(s2, nu, config.error_quantile);

  Rng rng(config.seed);
  const SplitCandidates cand = SplitCandidates::from_design(X);
  EnsembleState state(static_cast<std::size_t>(config.n_tree), n);
  double sigma2 = s2;

  BartPosterior post;
  post.y_hat_train.resize(n, config.n_kept());
  post.y_hat_test.resize(X_test.rows(), config.n_kept());
  post.sigma2_draws.reserve(static_cast<std::size_t>(config.n_kept()));

  for (int sweep = 0; sweep < config.n_mcmc; ++sweep) {
    state.sweep(X, cand, ys, sigma2, leaf_var, config.depth_alpha,
                config.depth_beta, rng);

    const double ssr = (ys - state.fit()).squaredNorm();
    const double shape = 0.5 * (nu + static_cast<double>(n));
    const double rate = 0.5 * (nu * lambda + ssr);
    sigma2 = rate / rng.gamma(shape, 1.0);

    if (sweep >= config.n_burn) {
      const int k = sweep - config.n_burn;
      // Fresh ensemble evaluation rather than the incrementally maintained
      // fit, so train and test predictions share one summation path.
      post.y_hat_train.col(k) =
          ((state.ensemble().predict(X).array() + 0.5) * range + y_min)
              .matrix();
      if (X_test.rows() > 0)
        post.y_hat_test.col(k) =
            ((state.ensemble().predict(X_test).array() + 0.5) * range + y_min)
                .matrix();
      post.sigma2_draws.push_back(sigma2 * range * range);
    }
  }
  post.accept_rate = state.acceptance_rate();
  return post;
}

BartPosterior fit_probit_bart(const Eigen::MatrixXd& X,
                              const std::vector<int>& t,
                              const BartConfig& config) {
  config.validate();
  check_finite(X, "X");
  const Eigen::Index n = X.rows();
  if (static_cast<Eigen::Index>(t.size()) != n)
    throw std::invalid_argument("X/t row mismatch");
  int ones = 0;
  for (int v : t) {
    if (v != 0 && v != 1)
      throw std::invalid_argument("t must contain only 0 and 1");
    ones += v;
  }
  if (ones == 0 || ones == static_cast<int>(t.size()))
    throw std::invalid_argument("t must contain both classes");

  // Latent scale: sigma^2 fixed at 1, leaf prior sd 3/(k sqrt(m)) so the
  // ensemble fit spans roughly +-3 a priori.
  const double m = config.n_tree;
  const double leaf_sd =
      3.0 / (config.leaf_shrinkage_k * std::sqrt(m));
  const double leaf_var = leaf_sd * leaf_sd;
  constexpr double sigma2 = 1.0;

  Rng rng(config.seed);
  const SplitCandidates cand = SplitCandidates::from_design(X);
  EnsembleState state(static_cast<std::size_t>(config.n_tree), n);

  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i)
    z(i) = rng.truncated_normal(0.0, 1.0, t[static_cast<std::size_t>(i)] == 1);

  BartPosterior post;
  post.y_hat_train.resize(n, config.n_kept());
  post.y_hat_test.resize(0, config.n_kept());

  for (int sweep = 0; sweep < config.n_mcmc; ++sweep) {
    state.sweep(X, cand, z, sigma2, leaf_var, config.depth_alpha,
                config.depth_beta, rng);
    for (Eigen::Index i = 0; i < n; ++i)
      z(i) = rng.truncated_normal(state.fit()(i), 1.0,
                                  t[static_cast<std::size_t>(i)] == 1);
    if (sweep >= config.n_burn)
      post.y_hat_train.col(sweep - config.n_burn) = state.fit();
  }
  post.accept_rate = state.acceptance_rate();
  return post;
}

std::vector<double> estimate_ps(const BartPosterior& posterior) {
  static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
  const Eigen::Index n = posterior.y_hat_train.rows();
  const Eigen::Index k = posterior.y_hat_train.cols();
  std::vector<double> ps(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
      acc += boost::math::cdf(std_normal, posterior.y_hat_train(i, j));
    ps[static_cast<std::size_t>(i)] = acc / static_cast<double>(k);
  }
  return ps;
}

}  // namespace subart
