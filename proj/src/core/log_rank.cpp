#include "tsf/core/log_rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace tsf {

double log_rank_sorted(std::span<const double> durations, std::span<const int> events,
                       std::span<const std::uint8_t> in_a) {
  double o_minus_e = 0.0;
  double variance = 0.0;
  std::int64_t at_risk = 0;
  std::int64_t at_risk_a = 0;
  std::size_t i = durations.size();
  // Walk from the latest time back so the risk set grows monotonically.
  while (i > 0) {
    const double t = durations[i - 1];
    std::int64_t deaths = 0;
    std::int64_t deaths_a = 0;
    while (i > 0 && durations[i - 1] == t) {
      --i;
      ++at_risk;
      at_risk_a += in_a[i];
      if (events[i] == 1) {
        ++deaths;
        deaths_a += in_a[i];
      }
    }
    if (deaths == 0 || at_risk < 2) continue;
    const double y = static_cast<double>(at_risk);
    const double d = static_cast<double>(deaths);
    const double p = static_cast<double>(at_risk_a) / y;
    const double v = d * p * (1.0 - p) * (y - d) / (y - 1.0);
    if (v <= 0.0) continue;
    o_minus_e += static_cast<double>(deaths_a) - d * p;
    variance += v;
  }
  if (variance <= 0.0) return 0.0;
  return std::abs(o_minus_e) / std::sqrt(variance);
}

double log_rank_statistic(SurvivalSample a, SurvivalSample b) {
  if (a.durations.empty() || b.durations.empty()) throw std::invalid_argument("degenerate split");
  if (a.events.size() != a.durations.size() || b.events.size() != b.durations.size()) {
    throw std::invalid_argument("log-rank: durations/events length mismatch");
  }
  const std::size_t n = a.durations.size() + b.durations.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto time_of = [&](std::size_t k) {
    return k < a.durations.size() ? a.durations[k] : b.durations[k - a.durations.size()];
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return time_of(x) < time_of(y); });
  std::vector<double> t(n);
  std::vector<int> e(n);
  std::vector<std::uint8_t> in_a(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    const bool from_a = src < a.durations.size();
    t[k] = time_of(src);
    e[k] = from_a ? a.events[src] : b.events[src - a.durations.size()];
    in_a[k] = from_a ? 1 : 0;
  }
  return log_rank_sorted(t, e, in_a);
}

}  // namespace tsf
