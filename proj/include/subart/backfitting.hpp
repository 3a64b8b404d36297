#pragma once

#include <Eigen/Dense>
#include <vector>

#include "subart/rng.hpp"
#include "subart/tree.hpp"

namespace subart {

/// One tree ensemble together with its cached per-tree fits on the training
/// design, maintained incrementally across backfitting sweeps.
class EnsembleState {
 public:
  EnsembleState(std::size_t m, Eigen::Index n)
      : ensemble_(m),
        tree_fit_(m, Eigen::VectorXd::Zero(n)),
        total_fit_(Eigen::VectorXd::Zero(n)) {}

  const TreeEnsemble& ensemble() const { return ensemble_; }
  const Eigen::VectorXd& fit() const { return total_fit_; }

  /// One Bayesian backfitting sweep over all trees: per tree, an MH move on
  /// the topology against the partial residual of `target`, then conjugate
  /// normal redraws of every leaf value. sigma2 is the error variance of the
  /// univariate working model, leaf_var the leaf-value prior variance.
  void sweep(const Eigen::MatrixXd& X, const SplitCandidates& cand,
             const Eigen::VectorXd& target, double sigma2, double leaf_var,
             double depth_alpha, double depth_beta, Rng& rng);

  /// Fraction of proposals accepted over the lifetime of the state.
  double acceptance_rate() const {
    return proposals_ == 0 ? 0.0
                           : static_cast<double>(accepts_) /
                                 static_cast<double>(proposals_);
  }

 private:
  TreeEnsemble ensemble_;
  std::vector<Eigen::VectorXd> tree_fit_;
  Eigen::VectorXd total_fit_;
  long proposals_ = 0;
  long accepts_ = 0;
};

/// Per-leaf sufficient statistics (row count, residual sum) for a tree on a
/// design; returns false if some leaf receives zero rows.
bool leaf_stats(const RegressionTree& tree, const Eigen::MatrixXd& X,
                const Eigen::VectorXd& resid, std::vector<int>& leaf_of_row,
                std::vector<int>& count, std::vector<double>& sum);

/// Log marginal likelihood of the residual vector under the tree partition,
/// integrating the leaf values over their N(0, leaf_var) prior.
double log_marginal(const std::vector<int>& count,
                    const std::vector<double>& sum, double sigma2,
                    double leaf_var);

}  // namespace subart
