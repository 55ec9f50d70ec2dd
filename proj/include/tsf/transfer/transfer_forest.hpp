#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tsf/core/cohort.hpp"
#include "tsf/forest/forest.hpp"
#include "tsf/transfer/structure.hpp"

namespace tsf {

struct TransferConfig {
  std::size_t n_target_trees = 500;
  // Transferred levels; nullopt transfers whole source trees.
  std::optional<int> levels = 2;
  // Governs growth below the transferred levels, split candidates and the
  // bootstrap toggle for target resamples.
  GrowthConfig growth;
  std::uint64_t rng_seed = 0;
};

// Bookkeeping for structure fidelity checks. A prescribed node whose feature
// cannot split the target subjects reaching it is truncated to a terminal;
// every such node is recorded here.
struct TransferTrace {
  std::vector<StructureSignature> prototypes;            // TSF-T_k: sampled signature per tree
  std::vector<std::size_t> source_tree;                  // TSF-T_inf: sampled source tree per tree
  std::vector<std::vector<std::size_t>> truncated;       // TSF-T_k: truncated level-order positions
  std::vector<std::size_t> n_truncated;                  // truncated nodes per tree (all methods)

  std::size_t total_truncated() const;
};

struct TransferResult {
  Forest forest;
  TransferTrace trace;
};

struct FineTunedTree {
  SurvivalTree tree;
  std::vector<std::size_t> truncated_positions;
};

// Grows one target tree whose top levels follow `signature`: prescribed
// positions split on the given feature with the value chosen on `sample`;
// kLeaf positions and deeper levels grow freely per config.growth.
FineTunedTree fine_tune_tree(const StructureSignature& signature, const Cohort& target,
                             std::span<const std::size_t> sample, std::span<const double> time_grid,
                             const TransferConfig& config, Rng& rng);

TransferResult fit_transfer_forest(const StructureDistribution& dist, const Cohort& target,
                                   const TransferConfig& config, std::size_t n_threads = 0);

TransferResult fit_dp_forest(const DepthwiseDistribution& dp, const Cohort& target,
                             const TransferConfig& config, std::size_t n_threads = 0);

// TSF-T_inf: each target tree copies the full feature structure of a
// uniformly drawn source tree and re-optimizes every split value top-down.
// No growth beyond the transferred structure.
TransferResult fit_transfer_forest_unlimited(const Forest& source, const Cohort& target,
                                             const TransferConfig& config, std::size_t n_threads = 0);

// Dispatches on config.levels.
TransferResult transfer_from_source(const Forest& source, const Cohort& target, const TransferConfig& config,
                                    std::size_t n_threads = 0);

// Signature positions where `tree` departs from `prototype` (both non-leaf
// but different, or prototype prescribes a feature and tree has a leaf).
std::vector<std::size_t> signature_mismatches(const StructureSignature& prototype,
                                              const StructureSignature& tree_signature);

// True when every mismatch is a truncated position or lies below one.
bool mismatches_explained(const std::vector<std::size_t>& mismatches,
                          const std::vector<std::size_t>& truncated_positions);

}  // namespace tsf
