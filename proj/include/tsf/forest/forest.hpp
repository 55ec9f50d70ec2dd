#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tsf/core/cohort.hpp"
#include "tsf/core/step_function.hpp"
#include "tsf/forest/tree.hpp"
#include "tsf/forest/tree_builder.hpp"

namespace tsf {

struct Forest {
  std::vector<SurvivalTree> trees;
  GrowthConfig config;
  std::vector<double> time_grid;
  std::size_t n_features = 0;

  std::size_t n_trees() const { return trees.size(); }
  friend bool operator==(const Forest&, const Forest&) = default;
};

// Best split for the given rows of `cohort`.
std::optional<Split> best_split(const Cohort& cohort, std::span<const std::size_t> subjects,
                                std::span<const std::size_t> candidate_features, const GrowthConfig& config);

// One tree on the given rows (bootstrap sample), terminals on `time_grid`.
SurvivalTree grow_tree(const Cohort& cohort, std::span<const std::size_t> sample,
                       std::span<const double> time_grid, const GrowthConfig& config, Rng& rng);

// Tree `t` is grown from derive_seed(config.rng_seed, "tree", {t}), so the
// result does not depend on `n_threads` (0 = hardware concurrency).
Forest fit_forest(const Cohort& cohort, std::size_t n_trees, const GrowthConfig& config,
                  std::size_t n_threads = 0);

// n draws with replacement, or 0..n-1 when bootstrap is off.
std::vector<std::size_t> bootstrap_sample(std::size_t n, bool bootstrap, Rng& rng);

// Mean terminal cumulative hazard over the trees, on the forest time grid.
StepFunction predict_chf(const Forest& forest, std::span<const double> x);
StepFunction predict_survival(const Forest& forest, std::span<const double> x);
// Sum of the predicted cumulative hazard over the time grid.
double predict_risk(const Forest& forest, std::span<const double> x);

}  // namespace tsf
