#pragma once

#include <Eigen/Dense>
#include <vector>

#include "subart/rng.hpp"

namespace subart {

/// Per-column candidate split values, derived from the observed design
/// matrix. Binary 0/1 columns carry the single candidate 0.5; all other
/// columns carry their sorted distinct observed values.
struct SplitCandidates {
  std::vector<std::vector<double>> values;  // one vector per column

  static SplitCandidates from_design(const Eigen::MatrixXd& X);
};

/// Axis-aligned binary regression tree stored in an index arena.
/// Rule at each internal node: go left iff row[split_column] <= split_value.
class RegressionTree {
 public:
  struct Node {
    bool leaf = true;
    int split_column = -1;
    double split_value = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;   // leaf value
    int depth = 0;
  };

  RegressionTree() { nodes_.push_back(Node{}); }
  explicit RegressionTree(double leaf_value) {
    nodes_.push_back(Node{});
    nodes_[0].value = leaf_value;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return 0; }

  /// Arena index of the leaf the row falls into.
  int leaf_index(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    return nodes_[static_cast<std::size_t>(leaf_index(row))].value;
  }

  std::vector<int> leaf_indices() const;
  /// Internal nodes whose children are both leaves (legal PRUNE targets).
  std::vector<int> prunable_indices() const;
  std::vector<int> internal_indices() const;
  std::size_t n_leaves() const { return leaf_indices().size(); }
  bool is_stump() const { return nodes_.size() == 1; }

  void set_leaf_value(int node, double v) {
    nodes_[static_cast<std::size_t>(node)].value = v;
  }

  /// Structural edits used by the MH moves. grow splits a leaf in place;
  /// prune collapses a prunable node back to a leaf and compacts the arena.
  void grow(int leaf, int split_column, double split_value);
  void prune(int node);
  void change(int node, int split_column, double split_value);

 private:
  void compact();
  std::vector<Node> nodes_;
};

/// Ordered list of trees; prediction is the exact sum in tree order.
struct TreeEnsemble {
  std::vector<RegressionTree> trees;

  explicit TreeEnsemble(std::size_t m = 0, double leaf_value = 0.0)
      : trees(m, RegressionTree(leaf_value)) {}

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

enum class MoveKind { Grow, Prune, Change };

/// A proposed structural edit, already applied to `tree`, together with
/// log q(T|T') - log q(T'|T) + log p(T')/p(T) restricted to topology terms
/// (split-rule prior and proposal terms cancel by construction). The
/// likelihood ratio is the caller's responsibility.
struct Proposal {
  MoveKind kind = MoveKind::Grow;
  RegressionTree tree;
  double log_move_ratio = 0.0;
};

/// Draw one structural proposal. Move mix: GROW 0.3 / PRUNE 0.3 / CHANGE 0.4;
/// a stump can only GROW. depth_alpha/depth_beta parameterize the
/// alpha*(1+d)^-beta split-probability prior entering the topology ratio.
Proposal propose_move(const RegressionTree& tree, const SplitCandidates& cand,
                      double depth_alpha, double depth_beta, Rng& rng);

}  // namespace subart
