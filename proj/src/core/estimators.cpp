#include "tsf/core/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsf {

namespace {

struct Record {
  double time;
  int event;
  std::int64_t weight;
};

EventTable table_from_records(std::vector<Record> records) {
  std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) { return a.time < b.time; });
  EventTable table;
  std::int64_t remaining = 0;
  for (const auto& r : records) remaining += r.weight;
  std::size_t i = 0;
  while (i < records.size()) {
    const double t = records[i].time;
    std::int64_t group = 0;
    std::int64_t deaths = 0;
    for (; i < records.size() && records[i].time == t; ++i) {
      group += records[i].weight;
      if (records[i].event == 1) deaths += records[i].weight;
    }
    if (deaths > 0) {
      table.times.push_back(t);
      table.deaths.push_back(deaths);
      table.at_risk.push_back(remaining);
    }
    remaining -= group;
  }
  return table;
}

}  // namespace

EventTable build_event_table(std::span<const double> durations, std::span<const int> events,
                             std::optional<std::span<const std::int64_t>> weights) {
  if (durations.empty()) throw std::invalid_argument("empty cohort");
  if (events.size() != durations.size() || (weights && weights->size() != durations.size())) {
    throw std::invalid_argument("event table: input lengths differ");
  }
  std::vector<Record> records(durations.size());
  for (std::size_t i = 0; i < durations.size(); ++i) {
    const std::int64_t w = weights ? (*weights)[i] : 1;
    if (w < 1) throw std::invalid_argument("event table: weights must be positive integers");
    records[i] = {durations[i], events[i], w};
  }
  return table_from_records(std::move(records));
}

EventTable build_event_table(const Cohort& cohort, std::span<const std::size_t> indices) {
  if (indices.empty()) throw std::invalid_argument("empty cohort");
  std::vector<Record> records(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    records[k] = {cohort.durations()[indices[k]], cohort.events()[indices[k]], 1};
  }
  return table_from_records(std::move(records));
}

StepFunction nelson_aalen(const EventTable& table) {
  std::vector<double> values(table.size());
  double h = 0.0;
  for (std::size_t l = 0; l < table.size(); ++l) {
    h += static_cast<double>(table.deaths[l]) / static_cast<double>(table.at_risk[l]);
    values[l] = h;
  }
  return StepFunction(table.times, std::move(values), 0.0);
}

StepFunction kaplan_meier(const EventTable& table) {
  std::vector<double> values(table.size());
  double s = 1.0;
  for (std::size_t l = 0; l < table.size(); ++l) {
    s *= 1.0 - static_cast<double>(table.deaths[l]) / static_cast<double>(table.at_risk[l]);
    values[l] = s;
  }
  return StepFunction(table.times, std::move(values), 1.0);
}

StepFunction surv_from_cumhaz(const StepFunction& h) {
  if (h.initial_value() < 0.0) throw std::invalid_argument("not a cumulative hazard");
  std::vector<double> values(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h.values()[j] < 0.0) throw std::invalid_argument("not a cumulative hazard");
    values[j] = std::exp(-h.values()[j]);
  }
  return StepFunction(h.knots(), std::move(values), std::exp(-h.initial_value()));
}

std::vector<double> nelson_aalen_on_grid(const Cohort& cohort, std::span<const std::size_t> indices,
                                         std::span<const double> grid) {
  std::vector<double> out(grid.size(), 0.0);
  if (indices.empty()) return out;
  const EventTable table = build_event_table(cohort, indices);
  std::size_t l = 0;
  double h = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    while (l < table.size() && table.times[l] <= grid[g]) {
      h += static_cast<double>(table.deaths[l]) / static_cast<double>(table.at_risk[l]);
      ++l;
    }
    out[g] = h;
  }
  return out;
}

std::vector<double> distinct_event_times(const Cohort& cohort) {
  std::vector<double> times;
  for (std::size_t i = 0; i < cohort.n_subjects(); ++i) {
    if (cohort.events()[i] == 1) times.push_back(cohort.durations()[i]);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

}  // namespace tsf
