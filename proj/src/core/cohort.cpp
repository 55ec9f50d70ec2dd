#include "tsf/core/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tsf {

Cohort::Cohort(std::vector<double> covariates, std::vector<double> durations,
               std::vector<int> events, std::vector<std::string> feature_names)
    : covariates_(std::move(covariates)),
      durations_(std::move(durations)),
      events_(std::move(events)),
      feature_names_(std::move(feature_names)) {
  if (durations_.empty()) throw std::invalid_argument("empty cohort");
  if (events_.size() != durations_.size()) {
    throw std::invalid_argument("cohort: events and durations differ in length");
  }
  if (covariates_.size() != durations_.size() * feature_names_.size()) {
    throw std::invalid_argument("cohort: covariate matrix does not match n_subjects x n_features");
  }
  for (double d : durations_) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("cohort: durations must be finite and >= 0");
  }
  for (int e : events_) {
    if (e != 0 && e != 1) throw std::invalid_argument("cohort: events must be 0 or 1");
  }
  std::set<std::string> names(feature_names_.begin(), feature_names_.end());
  if (names.size() != feature_names_.size()) throw std::invalid_argument("cohort: duplicate feature names");
}

std::size_t Cohort::n_events() const {
  return static_cast<std::size_t>(std::count(events_.begin(), events_.end(), 1));
}

Cohort Cohort::subset(std::span<const std::size_t> indices) const {
  const std::size_t p = n_features();
  std::vector<double> x;
  std::vector<double> t;
  std::vector<int> e;
  x.reserve(indices.size() * p);
  t.reserve(indices.size());
  e.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= n_subjects()) throw std::out_of_range("cohort subset index out of range");
    auto r = row(i);
    x.insert(x.end(), r.begin(), r.end());
    t.push_back(durations_[i]);
    e.push_back(events_[i]);
  }
  return Cohort(std::move(x), std::move(t), std::move(e), feature_names_);
}

}  // namespace tsf
