#include "tsf/transfer/transfer_forest.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "tsf/core/estimators.hpp"
#include "tsf/forest/tree_builder.hpp"
#include "tsf/util/parallel.hpp"

namespace tsf {

std::size_t TransferTrace::total_truncated() const {
  return std::accumulate(n_truncated.begin(), n_truncated.end(), std::size_t{0});
}

namespace {

void require_target(const Cohort& target, const TransferConfig& config) {
  if (target.n_subjects() == 0) throw std::invalid_argument("transfer: empty target");
  if (config.n_target_trees < 1) throw std::invalid_argument("transfer: n_target_trees must be >= 1");
  config.growth.validate(target.n_features());
}

class SignatureGrower {
 public:
  SignatureGrower(TreeBuilder& builder, const StructureSignature& sig, Rng& rng)
      : builder_(builder), sig_(sig), rng_(rng) {}

  int build(std::span<const std::size_t> subjects, int depth, std::size_t pos) {
    if (pos >= sig_.size() || sig_.at(pos) == StructureSignature::kLeaf) {
      return builder_.grow(subjects, depth, rng_);
    }
    std::optional<Split> split;
    if (builder_.config().allows_split_at(depth)) {
      split = builder_.split_on(subjects, static_cast<std::size_t>(sig_.at(pos)));
    }
    if (!split) {
      truncated.push_back(pos);
      return builder_.add_terminal(subjects);
    }
    const int id = builder_.add_internal(*split, subjects.size());
    auto [l, r] = builder_.partition(subjects, *split);
    const int left = build(l, depth + 1, 2 * pos + 1);
    const int right = build(r, depth + 1, 2 * pos + 2);
    builder_.link(id, left, right);
    return id;
  }

  std::vector<std::size_t> truncated;

 private:
  TreeBuilder& builder_;
  const StructureSignature& sig_;
  Rng& rng_;
};

TransferResult make_result(const Cohort& target, const TransferConfig& config) {
  TransferResult result;
  result.forest.config = config.growth;
  result.forest.n_features = target.n_features();
  result.forest.time_grid = distinct_event_times(target);
  result.forest.trees.resize(config.n_target_trees);
  result.trace.n_truncated.assign(config.n_target_trees, 0);
  return result;
}

}  // namespace

FineTunedTree fine_tune_tree(const StructureSignature& signature, const Cohort& target,
                             std::span<const std::size_t> sample, std::span<const double> time_grid,
                             const TransferConfig& config, Rng& rng) {
  if (sample.empty()) throw std::invalid_argument("fine_tune_tree: empty target");
  if (signature.size() == 0 || signature.at(0) == StructureSignature::kLeaf) {
    throw std::invalid_argument("fine_tune_tree: signature root must prescribe a feature");
  }
  for (int f : signature.positions()) {
    if (f != StructureSignature::kLeaf && (f < 0 || static_cast<std::size_t>(f) >= target.n_features())) {
      throw std::invalid_argument("fine_tune_tree: signature feature out of range for target");
    }
  }
  TreeBuilder builder(target, time_grid, config.growth);
  const auto sorted = builder.sort_by_duration({sample.begin(), sample.end()});
  SignatureGrower grower(builder, signature, rng);
  grower.build(sorted, 0, 0);
  return {std::move(builder).finish(), std::move(grower.truncated)};
}

TransferResult fit_transfer_forest(const StructureDistribution& dist, const Cohort& target,
                                   const TransferConfig& config, std::size_t n_threads) {
  require_target(target, config);
  if (dist.signatures.empty()) throw std::invalid_argument("transfer: empty structure distribution");
  TransferResult result = make_result(target, config);
  auto& trace = result.trace;
  trace.prototypes.resize(config.n_target_trees);
  trace.truncated.resize(config.n_target_trees);
  parallel_for(config.n_target_trees, n_threads, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(config.rng_seed, "tsf-tree", {t}));
    const StructureSignature& proto = sample_prototype(dist, rng);
    const auto sample = bootstrap_sample(target.n_subjects(), config.growth.bootstrap, rng);
    if (proto.at(0) == StructureSignature::kLeaf) {
      // A source tree that never split carries no structure: grow freely.
      result.forest.trees[t] = grow_tree(target, sample, result.forest.time_grid, config.growth, rng);
    } else {
      auto tuned = fine_tune_tree(proto, target, sample, result.forest.time_grid, config, rng);
      result.forest.trees[t] = std::move(tuned.tree);
      trace.truncated[t] = std::move(tuned.truncated_positions);
    }
    trace.prototypes[t] = proto;
    trace.n_truncated[t] = trace.truncated[t].size();
  });
  return result;
}

TransferResult fit_dp_forest(const DepthwiseDistribution& dp, const Cohort& target, const TransferConfig& config,
                             std::size_t n_threads) {
  require_target(target, config);
  for (const auto& level : dp.levels) {
    for (const auto& [f, p] : level) {
      if (f < 0 || static_cast<std::size_t>(f) >= target.n_features()) {
        throw std::invalid_argument("dp transfer: feature out of range for target");
      }
    }
  }
  TransferResult result = make_result(target, config);
  const int max_level = static_cast<int>(dp.max_level());
  parallel_for(config.n_target_trees, n_threads, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(config.rng_seed, "dp-tree", {t}));
    const auto sample = bootstrap_sample(target.n_subjects(), config.growth.bootstrap, rng);
    TreeBuilder builder(target, result.forest.time_grid, config.growth);
    std::size_t truncated = 0;
    auto build = [&](auto&& self, std::span<const std::size_t> subjects, int depth) -> int {
      if (depth >= max_level) return builder.grow(subjects, depth, rng);
      const auto& level = dp.levels[static_cast<std::size_t>(depth)];
      std::optional<Split> split;
      if (level.empty()) {
        if (builder.config().allows_split_at(depth)) split = builder.best_split(subjects, builder.sample_features(rng));
        if (!split) return builder.add_terminal(subjects);
      } else {
        const int f = sample_feature(level, rng);
        if (builder.config().allows_split_at(depth)) split = builder.split_on(subjects, static_cast<std::size_t>(f));
        if (!split) {
          ++truncated;
          return builder.add_terminal(subjects);
        }
      }
      const int id = builder.add_internal(*split, subjects.size());
      auto [l, r] = builder.partition(subjects, *split);
      const int left = self(self, l, depth + 1);
      const int right = self(self, r, depth + 1);
      builder.link(id, left, right);
      return id;
    };
    build(build, builder.sort_by_duration(sample), 0);
    result.forest.trees[t] = std::move(builder).finish();
    result.trace.n_truncated[t] = truncated;
  });
  return result;
}

TransferResult fit_transfer_forest_unlimited(const Forest& source, const Cohort& target,
                                             const TransferConfig& config, std::size_t n_threads) {
  require_target(target, config);
  if (source.trees.empty()) throw std::invalid_argument("transfer: empty source forest");
  if (source.n_features != target.n_features()) throw std::invalid_argument("transfer: feature count mismatch");
  TransferResult result = make_result(target, config);
  result.trace.source_tree.resize(config.n_target_trees);
  parallel_for(config.n_target_trees, n_threads, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(config.rng_seed, "tsf-inf-tree", {t}));
    const std::size_t pick = uniform_index(rng, source.trees.size());
    const SurvivalTree& proto = source.trees[pick];
    const auto sample = bootstrap_sample(target.n_subjects(), config.growth.bootstrap, rng);
    TreeBuilder builder(target, result.forest.time_grid, config.growth);
    std::size_t truncated = 0;
    auto revalue = [&](auto&& self, std::span<const std::size_t> subjects, int src_id, int depth) -> int {
      const TreeNode& src = proto.node(src_id);
      if (src.is_terminal()) return builder.add_terminal(subjects);
      std::optional<Split> split;
      if (builder.config().allows_split_at(depth)) {
        split = builder.split_on(subjects, static_cast<std::size_t>(src.feature));
      }
      if (!split) {
        ++truncated;
        return builder.add_terminal(subjects);
      }
      const int id = builder.add_internal(*split, subjects.size());
      auto [l, r] = builder.partition(subjects, *split);
      const int left = self(self, l, src.left, depth + 1);
      const int right = self(self, r, src.right, depth + 1);
      builder.link(id, left, right);
      return id;
    };
    revalue(revalue, builder.sort_by_duration(sample), 0, 0);
    result.forest.trees[t] = std::move(builder).finish();
    result.trace.source_tree[t] = pick;
    result.trace.n_truncated[t] = truncated;
  });
  return result;
}

TransferResult transfer_from_source(const Forest& source, const Cohort& target, const TransferConfig& config,
                                    std::size_t n_threads) {
  if (source.n_features != target.n_features()) throw std::invalid_argument("transfer: feature count mismatch");
  if (!config.levels) return fit_transfer_forest_unlimited(source, target, config, n_threads);
  return fit_transfer_forest(build_structure_distribution(source, *config.levels), target, config, n_threads);
}

std::vector<std::size_t> signature_mismatches(const StructureSignature& prototype,
                                              const StructureSignature& tree_signature) {
  std::vector<std::size_t> out;
  const std::size_t n = std::min(prototype.size(), tree_signature.size());
  for (std::size_t p = 0; p < n; ++p) {
    const int want = prototype.at(p);
    const int got = tree_signature.at(p);
    if (want == StructureSignature::kLeaf) continue;
    if (got != want) out.push_back(p);
  }
  return out;
}

bool mismatches_explained(const std::vector<std::size_t>& mismatches,
                          const std::vector<std::size_t>& truncated_positions) {
  for (std::size_t p : mismatches) {
    bool explained = false;
    for (std::size_t q = p + 1; q >= 1; q >>= 1) {
      if (std::find(truncated_positions.begin(), truncated_positions.end(), q - 1) != truncated_positions.end()) {
        explained = true;
        break;
      }
    }
    if (!explained) return false;
  }
  return true;
}

}  // namespace tsf
