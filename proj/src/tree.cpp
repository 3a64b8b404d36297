#include "subart/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subart {

SplitCandidates SplitCandidates::from_design(const Eigen::MatrixXd& X) {
  SplitCandidates c;
  c.values.resize(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    std::vector<double> v(X.col(j).data(), X.col(j).data() + X.rows());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    const bool binary =
        std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0 || x == 1.0; });
    if (binary)
      c.values[static_cast<std::size_t>(j)] = {0.5};
    else
      c.values[static_cast<std::size_t>(j)] = std::move(v);
  }
  return c;
}

int RegressionTree::leaf_index(
    const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int idx = 0;
  while (!nodes_[static_cast<std::size_t>(idx)].leaf) {
    const Node& nd = nodes_[static_cast<std::size_t>(idx)];
    idx = (row(nd.split_column) <= nd.split_value) ? nd.left : nd.right;
  }
  return idx;
}

std::vector<int> RegressionTree::leaf_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].leaf) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> RegressionTree::prunable_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& nd = nodes_[i];
    if (!nd.leaf && nodes_[static_cast<std::size_t>(nd.left)].leaf &&
        nodes_[static_cast<std::size_t>(nd.right)].leaf)
      out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> RegressionTree::internal_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!nodes_[i].leaf) out.push_back(static_cast<int>(i));
  return out;
}

void RegressionTree::grow(int leaf, int split_column, double split_value) {
  Node& nd = nodes_[static_cast<std::size_t>(leaf)];
  if (!nd.leaf) throw std::logic_error("grow target is not a leaf");
  const int d = nd.depth;
  Node child;
  child.depth = d + 1;
  child.value = nd.value;
  nodes_.push_back(child);
  nodes_.push_back(child);
  Node& nd2 = nodes_[static_cast<std::size_t>(leaf)];  // re-ref after push
  nd2.leaf = false;
  nd2.split_column = split_column;
  nd2.split_value = split_value;
  nd2.left = static_cast<int>(nodes_.size()) - 2;
  nd2.right = static_cast<int>(nodes_.size()) - 1;
}

void RegressionTree::prune(int node) {
  Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (nd.leaf || !nodes_[static_cast<std::size_t>(nd.left)].leaf ||
      !nodes_[static_cast<std::size_t>(nd.right)].leaf)
    throw std::logic_error("prune target must have two leaf children");
  nd.leaf = true;
  nd.left = nd.right = -1;
  nd.split_column = -1;
  compact();
}

void RegressionTree::change(int node, int split_column, double split_value) {
  Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (nd.leaf) throw std::logic_error("change target must be internal");
  nd.split_column = split_column;
  nd.split_value = split_value;
}

void RegressionTree::compact() {
  std::vector<Node> fresh;
  fresh.reserve(nodes_.size());
  // DFS copy; children indices rewritten, depths recomputed.
  struct Item { int old_idx; int parent; bool left; int depth; };
  std::vector<Item> stack{{0, -1, false, 0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    Node nd = nodes_[static_cast<std::size_t>(it.old_idx)];
    nd.depth = it.depth;
    const int new_idx = static_cast<int>(fresh.size());
    if (it.parent >= 0) {
      if (it.left) fresh[static_cast<std::size_t>(it.parent)].left = new_idx;
      else fresh[static_cast<std::size_t>(it.parent)].right = new_idx;
    }
    const int old_left = nd.left, old_right = nd.right;
    fresh.push_back(nd);
    if (!nd.leaf) {
      stack.push_back({old_right, new_idx, false, it.depth + 1});
      stack.push_back({old_left, new_idx, true, it.depth + 1});
    }
  }
  nodes_ = std::move(fresh);
}

Eigen::VectorXd TreeEnsemble::predict(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
  for (const auto& tree : trees)
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      out(i) += tree.predict(X.row(i));
  return out;
}

namespace {

double log_split_prob(double alpha, double beta, int depth) {
  return std::log(alpha) - beta * std::log1p(static_cast<double>(depth));
}

double log_no_split_prob(double alpha, double beta, int depth) {
  return std::log1p(-alpha * std::pow(1.0 + depth, -beta));
}

// Topology prior ratio contributed by growing a leaf at this depth.
double log_grow_prior_ratio(double alpha, double beta, int depth) {
  return log_split_prob(alpha, beta, depth) +
         2.0 * log_no_split_prob(alpha, beta, depth + 1) -
         log_no_split_prob(alpha, beta, depth);
}

constexpr double kGrowProb = 0.3;
constexpr double kPruneProb = 0.3;

}  // namespace

Proposal propose_move(const RegressionTree& tree, const SplitCandidates& cand,
                      double depth_alpha, double depth_beta, Rng& rng) {
  Proposal prop;
  prop.tree = tree;

  MoveKind kind;
  if (tree.is_stump()) {
    kind = MoveKind::Grow;  // only legal move
  } else {
    const double u = rng.uniform();
    kind = (u < kGrowProb)              ? MoveKind::Grow
           : (u < kGrowProb + kPruneProb) ? MoveKind::Prune
                                          : MoveKind::Change;
  }
  prop.kind = kind;

  auto draw_rule = [&](int& col, double& val) {
    col = static_cast<int>(rng.uniform_index(cand.values.size()));
    const auto& vals = cand.values[static_cast<std::size_t>(col)];
    val = vals[rng.uniform_index(vals.size())];
  };

  switch (kind) {
    case MoveKind::Grow: {
      const auto leaves = tree.leaf_indices();
      const int leaf = leaves[rng.uniform_index(leaves.size())];
      const int depth = tree.nodes()[static_cast<std::size_t>(leaf)].depth;
      int col;
      double val;
      draw_rule(col, val);
      prop.tree.grow(leaf, col, val);
      const double p_grow = tree.is_stump() ? 1.0 : kGrowProb;
      const auto np_new = prop.tree.prunable_indices().size();
      prop.log_move_ratio =
          log_grow_prior_ratio(depth_alpha, depth_beta, depth) +
          std::log(kPruneProb / static_cast<double>(np_new)) -
          std::log(p_grow / static_cast<double>(leaves.size()));
      break;
    }
    case MoveKind::Prune: {
      const auto prunable = tree.prunable_indices();
      const int node = prunable[rng.uniform_index(prunable.size())];
      const int depth = tree.nodes()[static_cast<std::size_t>(node)].depth;
      prop.tree.prune(node);
      const double p_grow_new = prop.tree.is_stump() ? 1.0 : kGrowProb;
      const auto n_leaves_new = prop.tree.n_leaves();
      prop.log_move_ratio =
          -log_grow_prior_ratio(depth_alpha, depth_beta, depth) +
          std::log(p_grow_new / static_cast<double>(n_leaves_new)) -
          std::log(kPruneProb / static_cast<double>(prunable.size()));
      break;
    }
    case MoveKind::Change: {
      const auto internal = tree.internal_indices();
      const int node = internal[rng.uniform_index(internal.size())];
      int col;
      double val;
      draw_rule(col, val);
      prop.tree.change(node, col, val);
      prop.log_move_ratio = 0.0;  // symmetric proposal, rule priors cancel
      break;
    }
  }
  return prop;
}

}  // namespace subart
