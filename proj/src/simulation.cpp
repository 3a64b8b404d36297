#include "subart/simulation.hpp"

#include <cmath>
#include <stdexcept>

#include "subart/bart.hpp"
#include "subart/baselines.hpp"

namespace subart {

void SimScenario::validate() const {
  if (n < 10) throw std::invalid_argument("scenario n must be >= 10");
  if (n_sim < 1) throw std::invalid_argument("n_sim must be >= 1");
  if (noise_sd < 0.0) throw std::invalid_argument("noise_sd must be >= 0");
}

double confounded_ps(double x) { return 1.0 / (1.0 + std::exp(-3.0 * x)); }

SimData gen_dataset(const SimScenario& scenario, Rng& rng,
                    const Eigen::VectorXd* shared_x) {
  scenario.validate();
  SimData d;
  if (shared_x) {
    if (shared_x->size() != scenario.n)
      throw std::invalid_argument("shared x has wrong length");
    d.x = *shared_x;
  } else {
    d.x.resize(scenario.n);
    for (int i = 0; i < scenario.n; ++i) d.x(i) = rng.normal();
  }
  d.t.resize(static_cast<std::size_t>(scenario.n));
  d.c.resize(scenario.n);
  for (int i = 0; i < scenario.n; ++i) {
    const double p = scenario.assignment == Assignment::Randomized
                         ? 0.5
                         : confounded_ps(d.x(i));
    d.t[static_cast<std::size_t>(i)] = rng.uniform() < p ? 1 : 0;
    const double ey0 = 3.0 * std::sin(d.x(i)) * d.x(i) * d.x(i);
    d.c(i) = ey0 + d.t[static_cast<std::size_t>(i)];
    if (scenario.noise_sd > 0.0) d.c(i) += rng.normal(0.0, scenario.noise_sd);
  }
  return d;
}

namespace {

double ols_ate(const SimData& d) {
  Eigen::MatrixXd X(d.x.size(), 2);
  for (Eigen::Index i = 0; i < d.x.size(); ++i)
    X(i, 0) = d.t[static_cast<std::size_t>(i)];
  X.col(1) = d.x;
  const LinearFit fit = fit_ols(X, d.c, {"t", "x"});
  return fit.coefficients(1, 0);  // treatment coefficient
}

double bart_ate(const SimData& d, std::uint64_t seed) {
  const Eigen::Index n = d.x.size();
  Eigen::MatrixXd X(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    X(i, 0) = d.t[static_cast<std::size_t>(i)];
  X.col(1) = d.x;

  // Counterfactual stack: x repeated, t = 0 then t = 1.
  Eigen::MatrixXd X_test(2 * n, 2);
  X_test.col(0).head(n).setZero();
  X_test.col(0).tail(n).setOnes();
  X_test.col(1).head(n) = d.x;
  X_test.col(1).tail(n) = d.x;

  BartConfig cfg;
  cfg.n_tree = 100;
  cfg.n_mcmc = 1100;
  cfg.n_burn = 100;
  cfg.seed = seed;
  const BartPosterior post = fit_bart(X, d.c, X_test, cfg);
  const Eigen::VectorXd mean = post.test_mean();
  return mean.tail(n).mean() - mean.head(n).mean();
}

EstimatorSummary summarize_estimates(std::vector<double> estimates) {
  EstimatorSummary s;
  s.estimates = std::move(estimates);
  double sum = 0.0;
  for (double v : s.estimates) sum += v;
  s.mean = sum / static_cast<double>(s.estimates.size());
  s.bias = s.mean - 1.0;
  if (s.estimates.size() > 1) {
    double ss = 0.0;
    for (double v : s.estimates) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.estimates.size() - 1));
  }
  return s;
}

}  // namespace

SimResult run_experiment(const SimScenario& scenario, bool with_ols,
                         bool with_bart) {
  scenario.validate();
  if (!with_ols && !with_bart)
    throw std::invalid_argument("at least one estimator must be requested");

  std::optional<Eigen::VectorXd> shared_x;
  if (scenario.shared_x) {
    Rng x_rng(derive_seed(scenario.seed, 0));
    shared_x.emplace(scenario.n);
    for (int i = 0; i < scenario.n; ++i) (*shared_x)(i) = x_rng.normal();
  }

  std::vector<double> ols_est, bart_est;
  for (int rep = 0; rep < scenario.n_sim; ++rep) {
    Rng rep_rng(derive_seed(scenario.seed, 1 + static_cast<std::uint64_t>(rep)));
    const SimData d = gen_dataset(scenario, rep_rng,
                                  shared_x ? &*shared_x : nullptr);
    if (with_ols) ols_est.push_back(ols_ate(d));
    if (with_bart)
      bart_est.push_back(bart_ate(
          d, derive_seed(scenario.seed, 100000 + static_cast<std::uint64_t>(rep))));
  }

  SimResult r;
  if (with_ols) r.ols = summarize_estimates(std::move(ols_est));
  if (with_bart) r.bart = summarize_estimates(std::move(bart_est));
  return r;
}

}  // namespace subart
