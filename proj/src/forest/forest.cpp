#include "tsf/forest/forest.hpp"

#include <numeric>
#include <stdexcept>

#include "tsf/core/estimators.hpp"
#include "tsf/simd/kernels.hpp"
#include "tsf/util/parallel.hpp"

namespace tsf {

std::optional<Split> best_split(const Cohort& cohort, std::span<const std::size_t> subjects,
                                std::span<const std::size_t> candidate_features, const GrowthConfig& config) {
  if (subjects.empty()) throw std::invalid_argument("best_split: empty subset");
  TreeBuilder builder(cohort, {}, config);
  const auto sorted = builder.sort_by_duration({subjects.begin(), subjects.end()});
  return builder.best_split(sorted, candidate_features);
}

SurvivalTree grow_tree(const Cohort& cohort, std::span<const std::size_t> sample,
                       std::span<const double> time_grid, const GrowthConfig& config, Rng& rng) {
  if (sample.empty()) throw std::invalid_argument("grow_tree: empty sample");
  TreeBuilder builder(cohort, time_grid, config);
  const auto sorted = builder.sort_by_duration({sample.begin(), sample.end()});
  builder.grow(sorted, 0, rng);
  return std::move(builder).finish();
}

std::vector<std::size_t> bootstrap_sample(std::size_t n, bool bootstrap, Rng& rng) {
  std::vector<std::size_t> idx(n);
  if (!bootstrap) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
  }
  for (auto& i : idx) i = uniform_index(rng, n);
  return idx;
}

Forest fit_forest(const Cohort& cohort, std::size_t n_trees, const GrowthConfig& config, std::size_t n_threads) {
  if (n_trees < 1) throw std::invalid_argument("fit_forest: n_trees must be >= 1");
  config.validate(cohort.n_features());
  Forest forest;
  forest.config = config;
  forest.n_features = cohort.n_features();
  forest.time_grid = distinct_event_times(cohort);
  forest.trees.resize(n_trees);
  parallel_for(n_trees, n_threads, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(config.rng_seed, "tree", {t}));
    const auto sample = bootstrap_sample(cohort.n_subjects(), config.bootstrap, rng);
    forest.trees[t] = grow_tree(cohort, sample, forest.time_grid, config, rng);
  });
  return forest;
}

StepFunction predict_chf(const Forest& forest, std::span<const double> x) {
  if (x.size() != forest.n_features) throw std::invalid_argument("predict: feature count mismatch");
  if (forest.trees.empty()) throw std::invalid_argument("predict: empty forest");
  std::vector<double> sum(forest.time_grid.size(), 0.0);
  for (const auto& tree : forest.trees) simd::accumulate(tree.terminal_for(x).cum_hazard, sum);
  const double n = static_cast<double>(forest.trees.size());
  for (double& v : sum) v /= n;
  return StepFunction(forest.time_grid, std::move(sum), 0.0);
}

StepFunction predict_survival(const Forest& forest, std::span<const double> x) {
  return surv_from_cumhaz(predict_chf(forest, x));
}

double predict_risk(const Forest& forest, std::span<const double> x) {
  const auto chf = predict_chf(forest, x);
  return std::accumulate(chf.values().begin(), chf.values().end(), 0.0);
}

}  // namespace tsf
