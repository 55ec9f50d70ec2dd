#include "tsf/transfer/structure.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsf {

StructureSignature::StructureSignature(int levels) {
  if (levels < 1 || levels > kMaxLevels) throw std::invalid_argument("signature: levels out of range");
  levels_ = levels;
  positions_.assign((std::size_t{1} << levels) - 1, kLeaf);
}

StructureSignature::StructureSignature(int levels, std::vector<int> positions) : StructureSignature(levels) {
  if (positions.size() != positions_.size()) throw std::invalid_argument("signature: wrong position count");
  positions_ = std::move(positions);
  if (!is_well_formed()) throw std::invalid_argument("signature: leaf position with non-leaf child");
}

int StructureSignature::level_of(std::size_t position) {
  int level = 0;
  for (std::size_t p = position + 1; p > 1; p >>= 1) ++level;
  return level;
}

bool StructureSignature::is_well_formed() const {
  for (std::size_t p = 0; p < positions_.size(); ++p) {
    if (positions_[p] != kLeaf) continue;
    const std::size_t l = 2 * p + 1;
    if (l < positions_.size() && (positions_[l] != kLeaf || positions_[l + 1] != kLeaf)) return false;
  }
  return true;
}

StructureSignature extract_signature(const SurvivalTree& tree, int levels) {
  StructureSignature sig(levels);
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, pos] = stack.back();
    stack.pop_back();
    const auto& node = tree.node(id);
    if (node.is_terminal()) continue;
    sig.set(pos, node.feature);
    const std::size_t child = 2 * pos + 1;
    if (child < sig.size()) {
      stack.emplace_back(node.left, child);
      stack.emplace_back(node.right, child + 1);
    }
  }
  return sig;
}

double StructureDistribution::probability_of(const StructureSignature& s) const {
  auto it = std::lower_bound(signatures.begin(), signatures.end(), s);
  if (it == signatures.end() || *it != s) return 0.0;
  return probabilities[static_cast<std::size_t>(it - signatures.begin())];
}

StructureDistribution build_structure_distribution(const Forest& source, int levels) {
  if (source.trees.empty()) throw std::invalid_argument("structure distribution: empty forest");
  std::map<StructureSignature, std::uint64_t> counts;
  for (const auto& tree : source.trees) ++counts[extract_signature(tree, levels)];
  StructureDistribution dist;
  dist.levels = levels;
  dist.source_n_trees = source.trees.size();
  for (const auto& [sig, count] : counts) {
    dist.signatures.push_back(sig);
    dist.counts.push_back(count);
    dist.probabilities.push_back(static_cast<double>(count) / static_cast<double>(dist.source_n_trees));
  }
  return dist;
}

DepthwiseDistribution build_depthwise_distribution(const Forest& source, int max_level) {
  if (source.trees.empty()) throw std::invalid_argument("depthwise distribution: empty forest");
  if (max_level < 1) throw std::invalid_argument("depthwise distribution: max_level must be >= 1");
  std::vector<std::map<int, std::uint64_t>> counts(static_cast<std::size_t>(max_level));
  for (const auto& tree : source.trees) {
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [id, depth] = stack.back();
      stack.pop_back();
      const auto& node = tree.node(id);
      if (node.is_terminal() || depth >= max_level) continue;
      ++counts[static_cast<std::size_t>(depth)][node.feature];
      stack.emplace_back(node.left, depth + 1);
      stack.emplace_back(node.right, depth + 1);
    }
  }
  DepthwiseDistribution dp;
  dp.levels.resize(counts.size());
  for (std::size_t l = 0; l < counts.size(); ++l) {
    std::uint64_t total = 0;
    for (const auto& [f, c] : counts[l]) total += c;
    for (const auto& [f, c] : counts[l]) {
      dp.levels[l][f] = static_cast<double>(c) / static_cast<double>(total);
    }
  }
  return dp;
}

namespace {

template <class It, class Weight>
It categorical_draw(It first, It last, Weight weight, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  It chosen = first;
  for (It it = first; it != last; ++it) {
    cumulative += weight(*it);
    chosen = it;
    if (u < cumulative) return it;
  }
  return chosen;  // rounding left u above the final cumulative sum
}

}  // namespace

const StructureSignature& sample_prototype(const StructureDistribution& dist, Rng& rng) {
  if (dist.signatures.empty()) throw std::invalid_argument("sample_prototype: empty distribution");
  std::vector<std::size_t> idx(dist.signatures.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto it = categorical_draw(idx.begin(), idx.end(), [&](std::size_t i) { return dist.probabilities[i]; }, rng);
  return dist.signatures[*it];
}

int sample_feature(const std::map<int, double>& level, Rng& rng) {
  if (level.empty()) throw std::invalid_argument("sample_feature: empty level");
  auto it = categorical_draw(level.begin(), level.end(), [](const auto& kv) { return kv.second; }, rng);
  return it->first;
}

}  // namespace tsf
