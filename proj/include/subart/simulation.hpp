#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "subart/rng.hpp"

namespace subart {

enum class Assignment { Randomized, Confounded };
enum class Estimator { Ols, Bart };

/// Misspecification experiment settings. shared_x keeps one covariate draw
/// across all replications, matching the reference experiment; switching it
/// off redraws x per replication.
struct SimScenario {
  Assignment assignment = Assignment::Randomized;
  int n = 200;
  int n_sim = 100;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  bool shared_x = true;

  void validate() const;
};

/// One simulated dataset: single covariate, binary treatment, cost outcome.
/// True model: c = t + 3 sin(x) x^2 + noise; true ATE = 1.
struct SimData {
  Eigen::VectorXd x;
  std::vector<int> t;
  Eigen::VectorXd c;
};

struct EstimatorSummary {
  std::vector<double> estimates;  // one per replication
  double mean = 0.0;
  std::optional<double> sd;       // absent when n_sim == 1
  double bias = 0.0;              // mean - 1
};

struct SimResult {
  std::optional<EstimatorSummary> ols;
  std::optional<EstimatorSummary> bart;
  double true_ate = 1.0;
};

/// Treatment probability under the confounded assignment, 1/(1+e^{-3x}).
double confounded_ps(double x);

/// Draw one dataset; x may be supplied (shared-x mode) or drawn from the rng.
SimData gen_dataset(const SimScenario& scenario, Rng& rng,
                    const Eigen::VectorXd* shared_x = nullptr);

/// Run the replication experiment for the requested estimators. BART uses
/// the compact settings of the reference experiment (100 trees, 1100 sweeps,
/// 100 burn-in). Replications are seeded by counter-based splitting.
SimResult run_experiment(const SimScenario& scenario, bool with_ols,
                         bool with_bart);

}  // namespace subart
