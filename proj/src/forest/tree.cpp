#include "tsf/forest/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tsf {

void GrowthConfig::validate(std::size_t n_features) const {
  if (max_depth && *max_depth < 0) throw std::invalid_argument("growth: max_depth must be >= 0");
  if (min_leaf_size < 1) throw std::invalid_argument("growth: min_leaf_size must be >= 1");
  if (min_split_events < 1) throw std::invalid_argument("growth: min_split_events must be >= 1");
  if (n_split_candidates < 1) throw std::invalid_argument("growth: n_split_candidates must be >= 1");
  if (mtry < 0 || static_cast<std::size_t>(mtry) > n_features) {
    throw std::invalid_argument("growth: mtry must lie in [1, n_features] (0 selects the default)");
  }
}

std::size_t GrowthConfig::resolved_mtry(std::size_t n_features) const {
  if (mtry > 0) return static_cast<std::size_t>(mtry);
  const auto m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features))));
  return std::clamp<std::size_t>(m, 1, std::max<std::size_t>(1, n_features));
}

SurvivalTree::SurvivalTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("survival tree needs at least one node");
  const int n = static_cast<int>(nodes_.size());
  for (const auto& node : nodes_) {
    if (!node.is_terminal() && (node.left <= 0 || node.left >= n || node.right <= 0 || node.right >= n)) {
      throw std::invalid_argument("survival tree: child index out of range");
    }
  }
}

const TreeNode& SurvivalTree::terminal_for(std::span<const double> x) const {
  const TreeNode* node = &nodes_.front();
  while (!node->is_terminal()) {
    const int next = x[static_cast<std::size_t>(node->feature)] <= node->split_value ? node->left : node->right;
    node = &nodes_[static_cast<std::size_t>(next)];
  }
  return *node;
}

int SurvivalTree::depth() const {
  int deepest = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.is_terminal()) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return deepest;
}

std::size_t SurvivalTree::n_terminals() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_terminal(); }));
}

}  // namespace tsf
