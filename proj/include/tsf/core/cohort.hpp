#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tsf {

// Covariates, follow-up durations and event indicators for a set of
// subjects. Covariates are stored row-major.
class Cohort {
 public:
  Cohort() = default;
  Cohort(std::vector<double> covariates, std::vector<double> durations, std::vector<int> events,
         std::vector<std::string> feature_names);

  std::size_t n_subjects() const { return durations_.size(); }
  std::size_t n_features() const { return feature_names_.size(); }

  std::span<const double> row(std::size_t i) const {
    return {covariates_.data() + i * n_features(), n_features()};
  }
  double value(std::size_t i, std::size_t feature) const {
    return covariates_[i * n_features() + feature];
  }

  const std::vector<double>& covariates() const { return covariates_; }
  const std::vector<double>& durations() const { return durations_; }
  const std::vector<int>& events() const { return events_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  std::size_t n_events() const;

  // Rows in the given order; indices may repeat (bootstrap resamples).
  Cohort subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Cohort&, const Cohort&) = default;

 private:
  std::vector<double> covariates_;
  std::vector<double> durations_;
  std::vector<int> events_;
  std::vector<std::string> feature_names_;
};

}  // namespace tsf
