#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tsf/core/cohort.hpp"
#include "tsf/core/step_function.hpp"

namespace tsf {

// Distinct event times with death counts and risk-set sizes. A subject
// censored at t is still at risk at t.
struct EventTable {
  std::vector<double> times;
  std::vector<std::int64_t> deaths;
  std::vector<std::int64_t> at_risk;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

// Throws std::invalid_argument("empty cohort") on empty input. Weights are
// integer replication counts.
EventTable build_event_table(std::span<const double> durations, std::span<const int> events,
                             std::optional<std::span<const std::int64_t>> weights = std::nullopt);

// Rows of `cohort` selected by `indices`; repeated indices count repeatedly.
EventTable build_event_table(const Cohort& cohort, std::span<const std::size_t> indices);

StepFunction nelson_aalen(const EventTable& table);
StepFunction kaplan_meier(const EventTable& table);

// S = exp(-H) on the same knots.
StepFunction surv_from_cumhaz(const StepFunction& cumulative_hazard);

// Nelson-Aalen of the selected rows evaluated at each point of `grid`.
std::vector<double> nelson_aalen_on_grid(const Cohort& cohort, std::span<const std::size_t> indices,
                                         std::span<const double> grid);

// Sorted distinct event times of a cohort.
std::vector<double> distinct_event_times(const Cohort& cohort);

}  // namespace tsf
