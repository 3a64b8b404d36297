#include "subart/cea.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subart {

DesignMatrix build_counterfactual_design(const DesignMatrix& X,
                                         const std::string& treatment_column) {
  const Eigen::Index t_col = X.column_index(treatment_column);
  const Eigen::Index n = X.values.rows();
  DesignMatrix out;
  out.column_names = X.column_names;
  out.factor_origin = X.factor_origin;
  out.values.resize(2 * n, X.values.cols());
  out.values.topRows(n) = X.values;
  out.values.bottomRows(n) = X.values;
  out.values.col(t_col).head(n).setZero();
  out.values.col(t_col).tail(n).setOnes();
  return out;
}

AteDraws compute_ate_draws(const SubartPosterior& posterior, Eigen::Index n) {
  if (posterior.y_hat_test_cost.rows() != 2 * n)
    throw std::invalid_argument(
        "test predictions must cover 2n counterfactual rows, got " +
        std::to_string(posterior.y_hat_test_cost.rows()) + " for n = " +
        std::to_string(n));
  const int k = posterior.n_kept();
  AteDraws draws;
  draws.delta_c.resize(static_cast<std::size_t>(k));
  draws.delta_q.resize(static_cast<std::size_t>(k));
  for (int d = 0; d < k; ++d) {
    draws.delta_c[static_cast<std::size_t>(d)] =
        posterior.y_hat_test_cost.col(d).tail(n).mean() -
        posterior.y_hat_test_cost.col(d).head(n).mean();
    draws.delta_q[static_cast<std::size_t>(d)] =
        posterior.y_hat_test_health.col(d).tail(n).mean() -
        posterior.y_hat_test_health.col(d).head(n).mean();
  }
  return draws;
}

std::vector<double> compute_inb(const AteDraws& draws, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  std::vector<double> inb(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i)
    inb[i] = lambda * draws.delta_q[i] - draws.delta_c[i];
  return inb;
}

std::vector<double> lambda_grid(double lo, double hi, int points) {
  if (points < 2 || lo > hi) throw std::invalid_argument("bad lambda grid");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    g[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

CeacCurve compute_ceac(const AteDraws& draws,
                       const std::vector<double>& lambda_grid) {
  if (draws.size() == 0 || lambda_grid.empty())
    throw std::invalid_argument("empty draws or lambda grid");
  CeacCurve curve;
  curve.lambda = lambda_grid;
  curve.p.resize(lambda_grid.size());
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < draws.size(); ++i)
      if (lambda_grid[k] * draws.delta_q[i] - draws.delta_c[i] > 0.0) ++pos;
    curve.p[k] = static_cast<double>(pos) / static_cast<double>(draws.size());
  }
  return curve;
}

double percentile(std::vector<double> sample, double p) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const double h = p * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return sample[lo] + (h - std::floor(h)) * (sample[hi] - sample[lo]);
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double frac_positive(const std::vector<double>& v) {
  std::size_t k = 0;
  for (double x : v)
    if (x > 0.0) ++k;
  return static_cast<double>(k) / static_cast<double>(v.size());
}

}  // namespace

CeaSummary summarize(const AteDraws& draws) {
  if (draws.size() < 2)
    throw std::invalid_argument("summarize needs at least 2 draws");
  CeaSummary s;
  s.mean_delta_c = mean_of(draws.delta_c);
  s.mean_delta_q = mean_of(draws.delta_q);
  s.sd_delta_c = sd_of(draws.delta_c, s.mean_delta_c);
  s.sd_delta_q = sd_of(draws.delta_q, s.mean_delta_q);
  s.ci90_delta_c = {percentile(draws.delta_c, 0.05),
                    percentile(draws.delta_c, 0.95)};
  s.ci95_delta_c = {percentile(draws.delta_c, 0.025),
                    percentile(draws.delta_c, 0.975)};
  s.ci90_delta_q = {percentile(draws.delta_q, 0.05),
                    percentile(draws.delta_q, 0.95)};
  s.ci95_delta_q = {percentile(draws.delta_q, 0.025),
                    percentile(draws.delta_q, 0.975)};

  double cov = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i)
    cov += (draws.delta_c[i] - s.mean_delta_c) *
           (draws.delta_q[i] - s.mean_delta_q);
  cov /= static_cast<double>(draws.size() - 1);
  const double denom = s.sd_delta_c * s.sd_delta_q;
  s.correlation = denom > 0.0 ? cov / denom : 0.0;

  s.p_ce_20000 = frac_positive(compute_inb(draws, 20000.0));
  s.p_ce_50000 = frac_positive(compute_inb(draws, 50000.0));
  return s;
}

}  // namespace subart
