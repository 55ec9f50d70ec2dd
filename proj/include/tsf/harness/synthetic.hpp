#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsf/core/cohort.hpp"

namespace tsf::harness {

struct CovariateSpec {
  std::string name;
  bool binary = false;
  double mean = 0.0;  // frequency for binary covariates
  double sd = 1.0;    // continuous only
  double lower = 0.0; // continuous draws are clipped below at this value
};

// beta * 1{z_a > 0} * 1{z_b > 0} on the standardized covariates; shared by
// both domains.
struct InteractionTerm {
  std::size_t a = 0;
  std::size_t b = 0;
  double beta = 0.0;
};

// Changes applied to the target domain. Empty vectors mean no shift.
struct DomainShift {
  double baseline_scale_multiplier = 1.0;
  std::vector<double> mean_shift;         // added to the covariate mean / frequency
  std::vector<double> coefficient_shift;  // added to beta
  double censoring_delta = 0.0;

  bool is_zero() const;
};

// Weibull proportional hazards: S(t | x) = exp(-(t / scale)^shape * exp(beta . z)),
// with z the covariates standardized by the source domain's nominal mean and sd
// (binary: p and sqrt(p (1 - p))). Independent exponential censoring whose rate
// is calibrated on each drawn sample to hit the requested censored fraction.
struct SyntheticSpec {
  std::size_t n_source = 5000;
  std::size_t n_target = 728;
  std::vector<CovariateSpec> covariates;
  std::vector<double> beta;
  std::vector<InteractionTerm> interactions;
  double weibull_scale = 120.0;
  double weibull_shape = 1.2;
  double censoring_rate = 0.746;  // censored fraction in the source domain
  DomainShift shift;
  int time_resolution = 10;  // durations rounded up to multiples of 1 / time_resolution
  std::uint64_t rng_seed = 0;

  void validate() const;

  // Eight stage-I colorectal covariates with marginals matching the two
  // registries used for the benchmark (source: population registry, target:
  // single hospital with heavier censoring).
  static SyntheticSpec colorectal();
};

struct CohortPair {
  Cohort source;
  Cohort target;
};

CohortPair generate_synthetic_pair(const SyntheticSpec& spec);

// One domain. `shifted` applies spec.shift.
Cohort generate_synthetic_cohort(const SyntheticSpec& spec, std::size_t n, bool shifted, std::uint64_t seed);

inline constexpr double kCensoringTolerance = 0.03;
inline constexpr int kCalibrationIterations = 200;

// Rate r such that the fraction of i with unit_exponential[i] / r < event_time[i]
// is as close to `target` as the sample allows. Throws std::runtime_error when
// the best achievable fraction is off by more than kCensoringTolerance.
double calibrate_censoring(std::span<const double> event_times, std::span<const double> unit_exponentials,
                           double target);

}  // namespace tsf::harness
