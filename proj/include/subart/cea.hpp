#pragma once

#include <Eigen/Dense>
#include <vector>

#include "subart/dataset.hpp"
#include "subart/subart.hpp"

namespace subart {

/// Joint posterior sample of the two average treatment effects; the object
/// every cost-effectiveness output is computed from.
struct AteDraws {
  std::vector<double> delta_c;  // currency units
  std::vector<double> delta_q;  // QALYs

  std::size_t size() const { return delta_c.size(); }
};

struct CeacCurve {
  std::vector<double> lambda;  // willingness-to-pay grid, non-decreasing
  std::vector<double> p;       // Pr(INB_lambda > 0)
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct CeaSummary {
  double mean_delta_c = 0.0, sd_delta_c = 0.0;
  double mean_delta_q = 0.0, sd_delta_q = 0.0;
  Interval ci90_delta_c, ci95_delta_c;
  Interval ci90_delta_q, ci95_delta_q;
  double correlation = 0.0;        // Pearson, (delta_c, delta_q)
  double p_ce_20000 = 0.0;         // Pr(INB > 0) at lambda = 20000
  double p_ce_50000 = 0.0;
};

/// Stack the design twice: rows 1..n with treatment forced to 0, rows
/// n+1..2n forced to 1; every other column copied unchanged.
DesignMatrix build_counterfactual_design(const DesignMatrix& X,
                                         const std::string& treatment_column = "t");

/// g-computation over the counterfactual stack: per draw, the mean predicted
/// outcome under treatment minus the mean under control.
AteDraws compute_ate_draws(const SubartPosterior& posterior, Eigen::Index n);

/// Per-draw incremental net benefit lambda*delta_q - delta_c.
std::vector<double> compute_inb(const AteDraws& draws, double lambda);

/// Fraction of draws with strictly positive INB at each grid point.
CeacCurve compute_ceac(const AteDraws& draws,
                       const std::vector<double>& lambda_grid);

/// Evenly spaced grid of `points` values on [lo, hi].
std::vector<double> lambda_grid(double lo, double hi, int points);

CeaSummary summarize(const AteDraws& draws);

/// Percentile of a sample with linear interpolation (R type-7 convention).
double percentile(std::vector<double> sample, double p);

}  // namespace subart
