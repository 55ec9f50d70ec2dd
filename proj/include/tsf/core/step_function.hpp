#pragma once

#include <span>
#include <vector>

namespace tsf {

// Right-continuous piecewise-constant function of time. Takes
// `initial_value` on [0, knots[0]) and values[j] on [knots[j], knots[j+1]).
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> knots, std::vector<double> values, double initial_value);

  static StepFunction constant(double value) { return StepFunction({}, {}, value); }

  double operator()(double t) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  double initial_value() const { return initial_value_; }
  std::size_t size() const { return knots_.size(); }

  // Survival curve shape: starts at 1, non-increasing, within [0, 1].
  bool is_survival() const;
  // Cumulative hazard shape: starts at 0, non-decreasing, non-negative.
  bool is_cumulative_hazard() const;

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  double initial_value_ = 0.0;
};

}  // namespace tsf
