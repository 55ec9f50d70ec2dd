#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tsf/core/cohort.hpp"
#include "tsf/core/random.hpp"
#include "tsf/forest/tree.hpp"

namespace tsf {

struct Split {
  std::size_t feature = 0;
  double value = 0.0;
  double statistic = 0.0;
};

// Split values tried for one feature: lower quantiles at j/(c+1), j = 1..c,
// of the node's values, deduplicated, excluding the node maximum.
std::vector<double> split_candidates(std::span<const double> node_values, int n_candidates);

// Incremental construction of one survival tree over rows of `data`.
// Subject lists handed to the builder are kept sorted by duration; children
// inherit the order, so the log-rank scan never re-sorts.
class TreeBuilder {
 public:
  TreeBuilder(const Cohort& data, std::span<const double> time_grid, const GrowthConfig& config);

  // Sorts subjects by (duration, row index); call once for a root sample.
  std::vector<std::size_t> sort_by_duration(std::vector<std::size_t> subjects) const;

  // Best log-rank split over `features` (ties: lowest feature, then smallest
  // value). Absent when the node is too small, has fewer than
  // min_split_events events, or no candidate yields valid children with a
  // positive statistic.
  std::optional<Split> best_split(std::span<const std::size_t> subjects,
                                  std::span<const std::size_t> features) const;
  std::optional<Split> split_on(std::span<const std::size_t> subjects, std::size_t feature) const;

  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition(
      std::span<const std::size_t> subjects, const Split& split) const;

  int add_terminal(std::span<const std::size_t> subjects);
  int add_internal(const Split& split, std::size_t n_samples);
  void link(int parent, int left, int right);

  // Standard recursive growth from `depth` with mtry features per node.
  int grow(std::span<const std::size_t> subjects, int depth, Rng& rng);

  std::vector<std::size_t> sample_features(Rng& rng) const;

  const GrowthConfig& config() const { return config_; }
  const Cohort& data() const { return data_; }

  SurvivalTree finish() &&;

 private:
  const Cohort& data_;
  std::span<const double> grid_;
  GrowthConfig config_;
  std::vector<TreeNode> nodes_;
};

}  // namespace tsf
