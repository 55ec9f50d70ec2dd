#pragma once

#include <cstdint>
#include <span>

namespace tsf {

struct SurvivalSample {
  std::span<const double> durations;
  std::span<const int> events;
};

// Absolute standardized two-sample log-rank statistic |O - E| / sqrt(V) over
// the pooled event-time grid. Returns 0 when the pooled data carry no
// variance. Throws std::invalid_argument("degenerate split") if either group
// is empty.
double log_rank_statistic(SurvivalSample group_a, SurvivalSample group_b);

// Shared kernel: pooled subjects sorted by ascending duration, `in_a` marks
// group membership (0/1).
double log_rank_sorted(std::span<const double> durations, std::span<const int> events,
                       std::span<const std::uint8_t> in_a);

}  // namespace tsf
