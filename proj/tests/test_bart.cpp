#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "subart/bart.hpp"
#include "subart/baselines.hpp"
#include "subart/rng.hpp"

using namespace subart;

namespace {

BartConfig quick_config(std::uint64_t seed) {
  BartConfig cfg;
  cfg.n_tree = 50;
  cfg.n_mcmc = 500;
  cfg.n_burn = 100;
  cfg.seed = seed;
  return cfg;
}

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

}  // namespace

TEST_CASE("bart recovers a linear signal close to the least-squares oracle") {
  const int n = 500;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n), truth(n);
  Rng rng(42);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    truth(i) = 2.0 * X(i, 0);
    y(i) = truth(i) + rng.normal(0.0, 0.1);
  }
  BartConfig cfg = quick_config(1);
  cfg.n_tree = 100;
  cfg.n_mcmc = 800;
  cfg.n_burn = 200;
  const BartPosterior post = fit_bart(X, y, Eigen::MatrixXd(0, 1), cfg);
  const double bart_rmse = rmse(post.train_mean(), truth);

  // Independent oracle: exact least squares on the same data.
  const LinearFit ols = fit_ols(X, y, {"x"});
  Eigen::VectorXd ols_pred(n);
  for (int i = 0; i < n; ++i)
    ols_pred(i) = ols.coefficients(0, 0) + ols.coefficients(1, 0) * X(i, 0);
  const double ols_rmse = rmse(ols_pred, truth);

  CHECK(ols_rmse < 0.02);       // the oracle is essentially exact here
  CHECK(bart_rmse <= 0.15);
}

TEST_CASE("pure noise is shrunk toward the mean") {
  const int n = 400;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  Rng rng(17);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    y(i) = rng.normal();  // no signal
  }
  const BartPosterior post = fit_bart(X, y, Eigen::MatrixXd(0, 1), quick_config(2));
  const Eigen::VectorXd mean = post.train_mean();
  const double var_pred = (mean.array() - mean.mean()).square().sum() / (n - 1);
  const double var_y = (y.array() - y.mean()).square().sum() / (n - 1);
  CHECK(var_pred <= 0.2 * var_y);
}

TEST_CASE("identical train and test inputs give identical draws") {
  const int n = 60;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  Rng rng(23);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = (i % 2);
    y(i) = X(i, 0) + rng.normal();
  }
  BartConfig cfg = quick_config(3);
  cfg.n_mcmc = 200;
  cfg.n_burn = 50;
  const BartPosterior post = fit_bart(X, y, X, cfg);
  CHECK(post.y_hat_train == post.y_hat_test);
}

TEST_CASE("fixed seed reproduces the posterior bit for bit") {
  const int n = 80;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  Rng rng(31);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    y(i) = std::sin(X(i, 0)) + rng.normal(0.0, 0.3);
  }
  BartConfig cfg = quick_config(77);
  cfg.n_mcmc = 300;
  cfg.n_burn = 100;
  const BartPosterior a = fit_bart(X, y, X, cfg);
  const BartPosterior b = fit_bart(X, y, X, cfg);
  CHECK(a.y_hat_train == b.y_hat_train);
  CHECK(a.y_hat_test == b.y_hat_test);
  CHECK(a.sigma2_draws == b.sigma2_draws);
}

TEST_CASE("affine outcome transforms map through the fit exactly") {
  const int n = 100;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  Rng rng(37);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    y(i) = X(i, 0) * X(i, 0) + rng.normal(0.0, 0.5);
  }
  BartConfig cfg = quick_config(5);
  cfg.n_mcmc = 250;
  cfg.n_burn = 100;
  const double a = 250.0, b = 1700.0;
  const BartPosterior base = fit_bart(X, y, Eigen::MatrixXd(0, 1), cfg);
  const BartPosterior scaled =
      fit_bart(X, (a * y.array() + b).matrix(), Eigen::MatrixXd(0, 1), cfg);
  const Eigen::MatrixXd mapped = a * base.y_hat_train.array() + b;
  CHECK((scaled.y_hat_train - mapped).cwiseAbs().maxCoeff() <
        1e-9 * std::abs(a));
}

TEST_CASE("sigma draws are positive and proposals mix") {
  const int n = 150;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  Rng rng(41);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    y(i) = std::cos(2.0 * X(i, 0)) + rng.normal(0.0, 0.4);
  }
  const BartPosterior post = fit_bart(X, y, Eigen::MatrixXd(0, 1), quick_config(6));
  for (double s2 : post.sigma2_draws) {
    CHECK(s2 > 0.0);
    CHECK(std::isfinite(s2));
  }
  CHECK(post.accept_rate > 0.0);
  CHECK(post.accept_rate < 1.0);
  CHECK(post.y_hat_train.allFinite());
}

TEST_CASE("degenerate inputs are rejected") {
  Eigen::MatrixXd X(10, 1);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(10, 3.0);
  for (int i = 0; i < 10; ++i) X(i, 0) = i;
  CHECK_THROWS_AS(fit_bart(X, y, Eigen::MatrixXd(0, 1), quick_config(7)),
                  std::invalid_argument);
  y(0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fit_bart(X, y, Eigen::MatrixXd(0, 1), quick_config(7)),
                  std::invalid_argument);

  std::vector<int> all_ones(10, 1);
  CHECK_THROWS_AS(fit_probit_bart(X, all_ones, quick_config(7)),
                  std::invalid_argument);
}

TEST_CASE("estimate_ps maps latent fits through the probit link") {
  BartPosterior post;
  post.y_hat_train = Eigen::MatrixXd::Zero(3, 5);
  auto ps = estimate_ps(post);
  for (double p : ps) CHECK(p == doctest::Approx(0.5).epsilon(1e-12));

  // Symmetric extreme draws average to one half.
  post.y_hat_train.resize(1, 2);
  post.y_hat_train << -40.0, 40.0;
  ps = estimate_ps(post);
  CHECK(ps[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("probit bart: covariate-free treatment rate is recovered") {
  const int n = 1000;
  Eigen::MatrixXd X(n, 2);
  std::vector<int> t(n);
  Rng rng(53);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
    t[static_cast<std::size_t>(i)] = rng.uniform() < 0.3 ? 1 : 0;
  }
  BartConfig cfg = quick_config(8);
  cfg.n_mcmc = 400;
  cfg.n_burn = 100;
  const BartPosterior post = fit_probit_bart(X, t, cfg);
  const auto ps = estimate_ps(post);
  double mean_ps = 0.0;
  for (double p : ps) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    mean_ps += p;
  }
  mean_ps /= n;
  CHECK(std::abs(mean_ps - 0.3) < 0.05);
}

TEST_CASE("probit bart is deterministic under a fixed seed") {
  const int n = 120;
  Eigen::MatrixXd X(n, 1);
  std::vector<int> t(n);
  Rng rng(59);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    t[static_cast<std::size_t>(i)] = rng.uniform() < 0.5 ? 1 : 0;
  }
  BartConfig cfg = quick_config(9);
  cfg.n_mcmc = 200;
  cfg.n_burn = 50;
  const BartPosterior a = fit_probit_bart(X, t, cfg);
  const BartPosterior b = fit_probit_bart(X, t, cfg);
  CHECK(a.y_hat_train == b.y_hat_train);
}

TEST_CASE("config invariants are enforced") {
  BartConfig cfg;
  cfg.n_burn = cfg.n_mcmc;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = BartConfig{};
  cfg.n_tree = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = BartConfig{};
  cfg.depth_alpha = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
