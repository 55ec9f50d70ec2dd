#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tsf {

struct GrowthConfig {
  std::optional<int> max_depth;  // nullopt: unlimited
  int min_leaf_size = 15;
  int min_split_events = 3;
  int mtry = 0;  // 0: ceil(sqrt(n_features))
  int n_split_candidates = 10;
  bool bootstrap = true;
  std::uint64_t rng_seed = 0;

  // Throws std::invalid_argument on out-of-range settings.
  void validate(std::size_t n_features) const;
  std::size_t resolved_mtry(std::size_t n_features) const;
  // A node at `depth` (root = 0) may split.
  bool allows_split_at(int depth) const { return !max_depth || depth < *max_depth; }

  friend bool operator==(const GrowthConfig&, const GrowthConfig&) = default;
};

// Subjects go left iff x[feature] <= split_value. Terminal nodes have
// feature == -1 and carry a cumulative hazard on the forest time grid.
struct TreeNode {
  int feature = -1;
  double split_value = 0.0;
  int left = -1;
  int right = -1;
  int n_samples = 0;
  std::vector<double> cum_hazard;

  bool is_terminal() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class SurvivalTree {
 public:
  SurvivalTree() = default;
  explicit SurvivalTree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const TreeNode& root() const { return nodes_.front(); }

  const TreeNode& terminal_for(std::span<const double> x) const;
  // Depth of the deepest node (single terminal = 0).
  int depth() const;
  std::size_t n_terminals() const;

  friend bool operator==(const SurvivalTree&, const SurvivalTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace tsf
