#include "tsf/forest/tree_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsf/core/estimators.hpp"
#include "tsf/core/log_rank.hpp"

namespace tsf {

std::vector<double> split_candidates(std::span<const double> node_values, int n_candidates) {
  std::vector<double> sorted(node_values.begin(), node_values.end());
  std::vector<double> out;
  if (sorted.size() < 2) return out;
  std::sort(sorted.begin(), sorted.end());
  const double top = sorted.back();
  const auto last = static_cast<double>(sorted.size() - 1);
  for (int j = 1; j <= n_candidates; ++j) {
    const double q = static_cast<double>(j) / static_cast<double>(n_candidates + 1);
    const auto idx = static_cast<std::size_t>(std::floor(q * last));
    const double v = sorted[idx];
    if (v < top) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TreeBuilder::TreeBuilder(const Cohort& data, std::span<const double> time_grid, const GrowthConfig& config)
    : data_(data), grid_(time_grid), config_(config) {
  config_.validate(data.n_features());
}

std::vector<std::size_t> TreeBuilder::sort_by_duration(std::vector<std::size_t> subjects) const {
  const auto& t = data_.durations();
  std::sort(subjects.begin(), subjects.end(), [&](std::size_t a, std::size_t b) {
    return t[a] < t[b] || (t[a] == t[b] && a < b);
  });
  return subjects;
}

std::optional<Split> TreeBuilder::best_split(std::span<const std::size_t> subjects,
                                             std::span<const std::size_t> features) const {
  const std::size_t n = subjects.size();
  const auto min_leaf = static_cast<std::size_t>(config_.min_leaf_size);
  if (n < 2 * min_leaf || n < 2) return std::nullopt;

  std::vector<double> t(n);
  std::vector<int> e(n);
  std::size_t n_events = 0;
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = data_.durations()[subjects[k]];
    e[k] = data_.events()[subjects[k]];
    n_events += static_cast<std::size_t>(e[k]);
  }
  if (n_events < static_cast<std::size_t>(config_.min_split_events)) return std::nullopt;

  std::vector<std::size_t> ordered(features.begin(), features.end());
  std::sort(ordered.begin(), ordered.end());

  std::optional<Split> best;
  std::vector<double> x(n);
  std::vector<std::uint8_t> left(n);
  for (std::size_t f : ordered) {
    for (std::size_t k = 0; k < n; ++k) x[k] = data_.value(subjects[k], f);
    for (double v : split_candidates(x, config_.n_split_candidates)) {
      std::size_t n_left = 0;
      for (std::size_t k = 0; k < n; ++k) {
        left[k] = x[k] <= v ? 1 : 0;
        n_left += left[k];
      }
      if (n_left < min_leaf || n - n_left < min_leaf) continue;
      const double stat = log_rank_sorted(t, e, left);
      if (stat > 0.0 && (!best || stat > best->statistic)) best = Split{f, v, stat};
    }
  }
  return best;
}

std::optional<Split> TreeBuilder::split_on(std::span<const std::size_t> subjects, std::size_t feature) const {
  const std::size_t one[] = {feature};
  return best_split(subjects, one);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> TreeBuilder::partition(
    std::span<const std::size_t> subjects, const Split& split) const {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  for (std::size_t s : subjects) {
    (data_.value(s, split.feature) <= split.value ? left : right).push_back(s);
  }
  return {std::move(left), std::move(right)};
}

int TreeBuilder::add_terminal(std::span<const std::size_t> subjects) {
  TreeNode node;
  node.n_samples = static_cast<int>(subjects.size());
  node.cum_hazard = nelson_aalen_on_grid(data_, subjects, grid_);
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size() - 1);
}

int TreeBuilder::add_internal(const Split& split, std::size_t n_samples) {
  TreeNode node;
  node.feature = static_cast<int>(split.feature);
  node.split_value = split.value;
  node.n_samples = static_cast<int>(n_samples);
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size() - 1);
}

void TreeBuilder::link(int parent, int left, int right) {
  auto& node = nodes_[static_cast<std::size_t>(parent)];
  node.left = left;
  node.right = right;
}

std::vector<std::size_t> TreeBuilder::sample_features(Rng& rng) const {
  const std::size_t p = data_.n_features();
  const std::size_t m = config_.resolved_mtry(p);
  std::vector<std::size_t> all(p);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + uniform_index(rng, p - i);
    std::swap(all[i], all[j]);
  }
  all.resize(m);
  return all;
}

int TreeBuilder::grow(std::span<const std::size_t> subjects, int depth, Rng& rng) {
  std::optional<Split> split;
  if (config_.allows_split_at(depth)) {
    const auto features = sample_features(rng);
    split = best_split(subjects, features);
  }
  if (!split) return add_terminal(subjects);
  const int id = add_internal(*split, subjects.size());
  auto [l, r] = partition(subjects, *split);
  const int left = grow(l, depth + 1, rng);
  const int right = grow(r, depth + 1, rng);
  link(id, left, right);
  return id;
}

SurvivalTree TreeBuilder::finish() && { return SurvivalTree(std::move(nodes_)); }

}  // namespace tsf
