#include "subart/subart.hpp"

#include <cmath>
#include <stdexcept>

#include "subart/backfitting.hpp"

namespace subart {

Eigen::Matrix2d sample_inverse_wishart(double df, const Eigen::Matrix2d& scale,
                                       Rng& rng) {
  if (df <= 1.0) throw std::invalid_argument("inverse-Wishart df too small");
  // Bartlett decomposition of W ~ Wishart(df, scale^-1); the draw is W^-1.
  const Eigen::Matrix2d V = scale.inverse();
  const Eigen::Matrix2d L = Eigen::LLT<Eigen::Matrix2d>(V).matrixL();
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  A(0, 0) = std::sqrt(rng.chi_squared(df));
  A(1, 1) = std::sqrt(rng.chi_squared(df - 1.0));
  A(1, 0) = rng.normal();
  const Eigen::Matrix2d LA = L * A;
  const Eigen::Matrix2d W = LA * LA.transpose();
  Eigen::Matrix2d S = W.inverse();
  S(0, 1) = S(1, 0) = 0.5 * (S(0, 1) + S(1, 0));  // enforce exact symmetry
  return S;
}

Eigen::Matrix2d sample_sigma(const Eigen::MatrixX2d& residuals,
                             const SigmaPrior& prior, Rng& rng) {
  if (!residuals.allFinite())
    throw std::invalid_argument("sample_sigma: non-finite residuals");
  const Eigen::Matrix2d S =
      prior.scale + residuals.transpose() * residuals;
  return sample_inverse_wishart(prior.df + static_cast<double>(residuals.rows()),
                                S, rng);
}

namespace {

struct OutcomeScale {
  double min = 0.0;
  double range = 1.0;
  double to_scaled(double y) const { return (y - min) / range - 0.5; }
  double to_original(double s) const { return (s + 0.5) * range + min; }
};

OutcomeScale observed_scale(const Eigen::MatrixX2d& Y,
                            const std::vector<std::array<bool, 2>>& missing,
                            int col) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  Eigen::Index n_obs = 0;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    if (missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)])
      continue;
    const double v = Y(i, col);
    if (!std::isfinite(v))
      throw std::invalid_argument("non-finite observed outcome value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ++n_obs;
  }
  if (n_obs < 2)
    throw std::invalid_argument("outcome column needs at least 2 observed values");
  if (lo == hi)
    throw std::invalid_argument("observed outcome column is constant");
  return {lo, hi - lo};
}

double observed_scaled_variance(const Eigen::VectorXd& ys,
                                const std::vector<std::array<bool, 2>>& missing,
                                int col) {
  double sum = 0.0, sum2 = 0.0;
  Eigen::Index n_obs = 0;
  for (Eigen::Index i = 0; i < ys.size(); ++i) {
    if (missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)])
      continue;
    sum += ys(i);
    sum2 += ys(i) * ys(i);
    ++n_obs;
  }
  const double mean = sum / static_cast<double>(n_obs);
  return (sum2 - static_cast<double>(n_obs) * mean * mean) /
         static_cast<double>(n_obs - 1);
}

}  // namespace

SubartPosterior fit_subart(const Eigen::MatrixXd& X, const Eigen::MatrixX2d& Y,
                           const std::vector<std::array<bool, 2>>& missing,
                           const Eigen::MatrixXd& X_test,
                           const SubartConfig& config) {
  config.base.validate();
  const Eigen::Index n = X.rows();
  if (Y.rows() != n || static_cast<Eigen::Index>(missing.size()) != n)
    throw std::invalid_argument("X/Y/missing row mismatch");
  if (n < 2) throw std::invalid_argument("need at least 2 observations");
  if (!X.allFinite()) throw std::invalid_argument("X contains non-finite values");
  if (X_test.cols() > 0 && !X_test.allFinite())
    throw std::invalid_argument("X_test contains non-finite values");

  const OutcomeScale scale[2] = {observed_scale(Y, missing, 0),
                                 observed_scale(Y, missing, 1)};

  // Working outcome matrix on the scaled scale; masked cells start at the
  // scaled midpoint and are redrawn every sweep.
  Eigen::MatrixX2d ys(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j)
      ys(i, j) = missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                     ? 0.0
                     : scale[j].to_scaled(Y(i, j));

  const double m = config.base.n_tree;
  const double leaf_sd = 0.5 / (config.base.leaf_shrinkage_k * std::sqrt(m));
  const double leaf_var = leaf_sd * leaf_sd;

  SigmaPrior prior;
  prior.df = config.sigma_df;
  prior.scale = Eigen::Matrix2d::Zero();
  prior.scale(0, 0) = observed_scaled_variance(ys.col(0), missing, 0);
  prior.scale(1, 1) = observed_scaled_variance(ys.col(1), missing, 1);

  Rng rng(config.base.seed);
  const SplitCandidates cand = SplitCandidates::from_design(X);
  EnsembleState state_c(static_cast<std::size_t>(config.base.n_tree), n);
  EnsembleState state_q(static_cast<std::size_t>(config.base.n_tree), n);

  Eigen::Matrix2d sigma = prior.scale;  // start at the prior scale (diagonal)

  SubartPosterior post;
  const int n_kept = config.base.n_kept();
  post.y_hat_train_cost.resize(n, n_kept);
  post.y_hat_train_health.resize(n, n_kept);
  post.y_hat_test_cost.resize(X_test.rows(), n_kept);
  post.y_hat_test_health.resize(X_test.rows(), n_kept);
  post.sigma_draws.reserve(static_cast<std::size_t>(n_kept));

  for (int sweep = 0; sweep < config.base.n_mcmc; ++sweep) {
    const Eigen::VectorXd& fc = state_c.fit();
    const Eigen::VectorXd& fq = state_q.fit();

    // (a) Impute masked cells from their conditional normals given the other
    // outcome, the current fits, and Sigma.
    {
      const double b_cq = sigma(0, 1) / sigma(1, 1);
      const double v_cq = sigma(0, 0) - sigma(0, 1) * sigma(0, 1) / sigma(1, 1);
      const double b_qc = sigma(0, 1) / sigma(0, 0);
      const double v_qc = sigma(1, 1) - sigma(0, 1) * sigma(0, 1) / sigma(0, 0);
      const Eigen::Matrix2d L =
          Eigen::LLT<Eigen::Matrix2d>(sigma).matrixL();
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool miss_c = missing[static_cast<std::size_t>(i)][0];
        const bool miss_q = missing[static_cast<std::size_t>(i)][1];
        if (miss_c && miss_q) {
          const double z0 = rng.normal();
          const double z1 = rng.normal();
          ys(i, 0) = fc(i) + L(0, 0) * z0;
          ys(i, 1) = fq(i) + L(1, 0) * z0 + L(1, 1) * z1;
        } else if (miss_c) {
          ys(i, 0) = rng.normal(fc(i) + b_cq * (ys(i, 1) - fq(i)),
                                std::sqrt(v_cq));
        } else if (miss_q) {
          ys(i, 1) = rng.normal(fq(i) + b_qc * (ys(i, 0) - fc(i)),
                                std::sqrt(v_qc));
        }
      }
    }

    // (b) Backfit each ensemble against the conditional reduction of its
    // outcome given the other equation's current residual.
    {
      const double b = sigma(0, 1) / sigma(1, 1);
      const double cond_var = sigma(0, 0) - sigma(0, 1) * sigma(0, 1) / sigma(1, 1);
      const Eigen::VectorXd target =
          ys.col(0) - b * (ys.col(1) - state_q.fit());
      state_c.sweep(X, cand, target, cond_var, leaf_var,
                    config.base.depth_alpha, config.base.depth_beta, rng);
    }
    {
      const double b = sigma(0, 1) / sigma(0, 0);
      const double cond_var = sigma(1, 1) - sigma(0, 1) * sigma(0, 1) / sigma(0, 0);
      const Eigen::VectorXd target =
          ys.col(1) - b * (ys.col(0) - state_c.fit());
      state_q.sweep(X, cand, target, cond_var, leaf_var,
                    config.base.depth_alpha, config.base.depth_beta, rng);
    }

    // (c) Sigma from its conjugate inverse-Wishart full conditional.
    {
      Eigen::MatrixX2d resid(n, 2);
      resid.col(0) = ys.col(0) - state_c.fit();
      resid.col(1) = ys.col(1) - state_q.fit();
      sigma = sample_sigma(resid, prior, rng);
      if (config.diagonal_sigma) sigma(0, 1) = sigma(1, 0) = 0.0;
    }

    if (sweep >= config.base.n_burn) {
      const int k = sweep - config.base.n_burn;
      const Eigen::VectorXd train_c = state_c.ensemble().predict(X);
      const Eigen::VectorXd train_q = state_q.ensemble().predict(X);
      post.y_hat_train_cost.col(k) =
          train_c.unaryExpr([&](double v) { return scale[0].to_original(v); });
      post.y_hat_train_health.col(k) =
          train_q.unaryExpr([&](double v) { return scale[1].to_original(v); });
      if (X_test.rows() > 0) {
        const Eigen::VectorXd test_c = state_c.ensemble().predict(X_test);
        const Eigen::VectorXd test_q = state_q.ensemble().predict(X_test);
        post.y_hat_test_cost.col(k) = test_c.unaryExpr(
            [&](double v) { return scale[0].to_original(v); });
        post.y_hat_test_health.col(k) = test_q.unaryExpr(
            [&](double v) { return scale[1].to_original(v); });
      }
      Eigen::Matrix2d sigma_orig;
      sigma_orig(0, 0) = sigma(0, 0) * scale[0].range * scale[0].range;
      sigma_orig(1, 1) = sigma(1, 1) * scale[1].range * scale[1].range;
      sigma_orig(0, 1) = sigma_orig(1, 0) =
          sigma(0, 1) * scale[0].range * scale[1].range;
      post.sigma_draws.push_back(sigma_orig);
    }
  }
  post.y_augmented.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j)
      post.y_augmented(i, j) =
          missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
              ? scale[j].to_original(ys(i, j))
              : Y(i, j);
  post.accept_rate = 0.5 * (state_c.acceptance_rate() + state_q.acceptance_rate());
  return post;
}

}  // namespace subart
