#include "tsf/core/step_function.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsf {

StepFunction::StepFunction(std::vector<double> knots, std::vector<double> values, double initial_value)
    : knots_(std::move(knots)), values_(std::move(values)), initial_value_(initial_value) {
  if (knots_.size() != values_.size()) throw std::invalid_argument("step function: knots/values length mismatch");
  for (std::size_t j = 1; j < knots_.size(); ++j) {
    if (!(knots_[j - 1] < knots_[j])) throw std::invalid_argument("step function: knots must be strictly increasing");
  }
}

double StepFunction::operator()(double t) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return initial_value_;
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

bool StepFunction::is_survival() const {
  if (initial_value_ != 1.0) return false;
  double prev = 1.0;
  for (double v : values_) {
    if (v > prev || v < 0.0) return false;
    prev = v;
  }
  return true;
}

bool StepFunction::is_cumulative_hazard() const {
  if (initial_value_ != 0.0) return false;
  double prev = 0.0;
  for (double v : values_) {
    if (v < prev) return false;
    prev = v;
  }
  return true;
}

}  // namespace tsf
