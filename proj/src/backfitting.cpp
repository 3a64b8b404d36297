#include "subart/backfitting.hpp"

#include <cmath>

namespace subart {

bool leaf_stats(const RegressionTree& tree, const Eigen::MatrixXd& X,
                const Eigen::VectorXd& resid, std::vector<int>& leaf_of_row,
                std::vector<int>& count, std::vector<double>& sum) {
  const auto n_nodes = tree.nodes().size();
  leaf_of_row.assign(static_cast<std::size_t>(X.rows()), -1);
  count.assign(n_nodes, 0);
  sum.assign(n_nodes, 0.0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const int leaf = tree.leaf_index(X.row(i));
    leaf_of_row[static_cast<std::size_t>(i)] = leaf;
    ++count[static_cast<std::size_t>(leaf)];
    sum[static_cast<std::size_t>(leaf)] += resid(i);
  }
  for (std::size_t j = 0; j < n_nodes; ++j)
    if (tree.nodes()[j].leaf && count[j] == 0) return false;
  return true;
}

double log_marginal(const std::vector<int>& count,
                    const std::vector<double>& sum, double sigma2,
                    double leaf_var) {
  double ll = 0.0;
  for (std::size_t j = 0; j < count.size(); ++j) {
    if (count[j] == 0) continue;
    const double n_l = count[j];
    const double denom = sigma2 + n_l * leaf_var;
    ll += 0.5 * std::log(sigma2 / denom) +
          leaf_var * sum[j] * sum[j] / (2.0 * sigma2 * denom);
  }
  return ll;
}

void EnsembleState::sweep(const Eigen::MatrixXd& X, const SplitCandidates& cand,
                          const Eigen::VectorXd& target, double sigma2,
                          double leaf_var, double depth_alpha,
                          double depth_beta, Rng& rng) {
  std::vector<int> leaf_of_row, count, cur_count;
  std::vector<double> sum, cur_sum;
  std::vector<int> cur_leaf_of_row;

  for (std::size_t t = 0; t < ensemble_.trees.size(); ++t) {
    RegressionTree& tree = ensemble_.trees[t];
    const Eigen::VectorXd partial =
        target - total_fit_ + tree_fit_[t];  // residual excluding this tree

    leaf_stats(tree, X, partial, cur_leaf_of_row, cur_count, cur_sum);
    const double cur_ll = log_marginal(cur_count, cur_sum, sigma2, leaf_var);

    Proposal prop = propose_move(tree, cand, depth_alpha, depth_beta, rng);
    ++proposals_;
    const bool proper =
        leaf_stats(prop.tree, X, partial, leaf_of_row, count, sum);
    if (proper) {  // empty-leaf proposals are auto-rejected
      const double new_ll = log_marginal(count, sum, sigma2, leaf_var);
      const double log_accept = new_ll - cur_ll + prop.log_move_ratio;
      if (std::log(rng.uniform()) < log_accept) {
        tree = std::move(prop.tree);
        cur_leaf_of_row = leaf_of_row;
        cur_count = count;
        cur_sum = sum;
        ++accepts_;
      }
    }

    // Conjugate leaf redraw given the (possibly updated) partition.
    std::vector<double> leaf_value(tree.nodes().size(), 0.0);
    for (std::size_t j = 0; j < tree.nodes().size(); ++j) {
      if (!tree.nodes()[j].leaf) continue;
      const double n_l = cur_count[j];
      const double denom = sigma2 + n_l * leaf_var;
      const double mean = leaf_var * cur_sum[j] / denom;
      const double sd = std::sqrt(leaf_var * sigma2 / denom);
      leaf_value[j] = rng.normal(mean, sd);
    }
    RegressionTree& tr = ensemble_.trees[t];
    for (std::size_t j = 0; j < tr.nodes().size(); ++j)
      if (tr.nodes()[j].leaf)
        tr.set_leaf_value(static_cast<int>(j), leaf_value[j]);

    total_fit_ -= tree_fit_[t];
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      tree_fit_[t](i) = leaf_value[static_cast<std::size_t>(
          cur_leaf_of_row[static_cast<std::size_t>(i)])];
    total_fit_ += tree_fit_[t];
  }
}

}  // namespace subart
