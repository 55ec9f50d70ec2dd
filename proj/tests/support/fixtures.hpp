#pragma once

#include <vector>

#include "tsf/core/cohort.hpp"
#include "tsf/harness/synthetic.hpp"

namespace fixture {

// Feature 0 separates ten early deaths from ten late ones; feature 1 is constant.
inline tsf::Cohort separable_cohort() {
  std::vector<double> cov, t;
  std::vector<int> e;
  for (int i = 0; i < 20; ++i) {
    cov.push_back(i < 10 ? 0.0 : 1.0);
    cov.push_back(5.0);
    t.push_back(i < 10 ? 1.0 + 0.1 * i : 10.0 + i);
    e.push_back(1);
  }
  return tsf::Cohort(cov, t, e, {"x0", "x1"});
}

// Four standard normal covariates with a strong proportional-hazards signal.
inline tsf::harness::SyntheticSpec signal_spec() {
  tsf::harness::SyntheticSpec s;
  s.covariates = {{"a", false, 0.0, 1.0, -1e9},
                  {"b", false, 0.0, 1.0, -1e9},
                  {"c", false, 0.0, 1.0, -1e9},
                  {"d", false, 0.0, 1.0, -1e9}};
  s.beta = {1.0, -0.8, 0.5, 0.0};
  s.censoring_rate = 0.3;
  s.weibull_scale = 10.0;
  s.weibull_shape = 1.5;
  return s;
}

inline tsf::Cohort signal_cohort(std::size_t n, std::uint64_t seed) {
  return tsf::harness::generate_synthetic_cohort(signal_spec(), n, false, seed);
}

}  // namespace fixture
