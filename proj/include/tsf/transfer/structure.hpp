#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "tsf/core/random.hpp"
#include "tsf/forest/forest.hpp"

namespace tsf {

// Splitting features over the top `levels` levels of a tree in level order
// (root 0, children of p at 2p+1 and 2p+2). kLeaf marks positions where the
// tree had already terminated. Split values are not part of a signature.
class StructureSignature {
 public:
  static constexpr int kLeaf = -1;
  static constexpr int kMaxLevels = 20;

  StructureSignature() = default;
  explicit StructureSignature(int levels);
  StructureSignature(int levels, std::vector<int> positions);

  int levels() const { return levels_; }
  std::size_t size() const { return positions_.size(); }
  int at(std::size_t position) const { return positions_[position]; }
  void set(std::size_t position, int feature) { positions_[position] = feature; }
  const std::vector<int>& positions() const { return positions_; }

  static int level_of(std::size_t position);

  // Every kLeaf position has kLeaf children.
  bool is_well_formed() const;

  auto operator<=>(const StructureSignature&) const = default;

 private:
  int levels_ = 0;
  std::vector<int> positions_;
};

StructureSignature extract_signature(const SurvivalTree& tree, int levels);

// Empirical distribution of k-level signatures over a source forest.
struct StructureDistribution {
  int levels = 0;
  std::vector<StructureSignature> signatures;  // sorted
  std::vector<std::uint64_t> counts;
  std::vector<double> probabilities;
  std::uint64_t source_n_trees = 0;

  std::size_t support_size() const { return signatures.size(); }
  double probability_of(const StructureSignature& s) const;

  friend bool operator==(const StructureDistribution&, const StructureDistribution&) = default;
};

StructureDistribution build_structure_distribution(const Forest& source, int levels);

// Per-level feature frequencies; levels[0] is the root level. Levels without
// any internal node are empty maps.
struct DepthwiseDistribution {
  std::vector<std::map<int, double>> levels;

  std::size_t max_level() const { return levels.size(); }
  friend bool operator==(const DepthwiseDistribution&, const DepthwiseDistribution&) = default;
};

DepthwiseDistribution build_depthwise_distribution(const Forest& source, int max_level);

// Categorical draw from the distribution.
const StructureSignature& sample_prototype(const StructureDistribution& dist, Rng& rng);

// Draw a feature from one level map (must be non-empty).
int sample_feature(const std::map<int, double>& level, Rng& rng);

}  // namespace tsf
