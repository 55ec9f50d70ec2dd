#include "tsf/harness/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "tsf/core/random.hpp"

namespace tsf::harness {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double censored_fraction(std::span<const double> t, std::span<const double> e, double rate) {
  std::size_t censored = 0;
  for (std::size_t i = 0; i < t.size(); ++i) censored += e[i] < rate * t[i];
  return static_cast<double>(censored) / static_cast<double>(t.size());
}

double shifted(const std::vector<double>& v, std::size_t i) { return v.empty() ? 0.0 : v[i]; }

}  // namespace

bool DomainShift::is_zero() const {
  auto zero = [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }); };
  return baseline_scale_multiplier == 1.0 && censoring_delta == 0.0 && zero(mean_shift) && zero(coefficient_shift);
}

void SyntheticSpec::validate() const {
  const std::size_t p = covariates.size();
  if (p == 0) throw std::invalid_argument("synthetic: no covariates");
  if (beta.size() != p) throw std::invalid_argument("synthetic: beta length differs from covariate count");
  if (!shift.mean_shift.empty() && shift.mean_shift.size() != p) {
    throw std::invalid_argument("synthetic: mean_shift length differs from covariate count");
  }
  if (!shift.coefficient_shift.empty() && shift.coefficient_shift.size() != p) {
    throw std::invalid_argument("synthetic: coefficient_shift length differs from covariate count");
  }
  if (!all_finite(beta) || !all_finite(shift.mean_shift) || !all_finite(shift.coefficient_shift) ||
      !std::isfinite(shift.censoring_delta) || !std::isfinite(shift.baseline_scale_multiplier)) {
    throw std::invalid_argument("synthetic: non-finite parameter");
  }
  if (!(weibull_scale > 0.0) || !(weibull_shape > 0.0) || !(shift.baseline_scale_multiplier > 0.0)) {
    throw std::invalid_argument("synthetic: Weibull parameters must be positive");
  }
  const double target_rate = censoring_rate + shift.censoring_delta;
  if (!(censoring_rate >= 0.0 && censoring_rate < 1.0) || !(target_rate >= 0.0 && target_rate < 1.0)) {
    throw std::invalid_argument("synthetic: censoring rate must lie in [0, 1)");
  }
  if (time_resolution <= 0) throw std::invalid_argument("synthetic: time_resolution must be positive");
  for (const auto& term : interactions) {
    if (term.a >= p || term.b >= p || term.a == term.b || !std::isfinite(term.beta)) {
      throw std::invalid_argument("synthetic: invalid interaction term");
    }
  }
  for (std::size_t f = 0; f < p; ++f) {
    const auto& c = covariates[f];
    if (c.binary && !(c.mean > 0.0 && c.mean < 1.0)) throw std::invalid_argument("synthetic: frequency outside (0, 1)");
    if (!c.binary && !(c.sd > 0.0)) throw std::invalid_argument("synthetic: sd must be positive");
  }
}

SyntheticSpec SyntheticSpec::colorectal() {
  SyntheticSpec s;
  s.covariates = {
      {"male", true, 0.511, 0.0, 0.0},
      {"age", false, 69.0, 12.0, 18.0},
      {"t2_stage", true, 0.55, 0.0, 0.0},
      {"tumor_size", false, 2.4, 1.3, 0.1},
      {"high_grade", true, 0.10, 0.0, 0.0},
      {"cea_positive", true, 0.898, 0.0, 0.0},
      {"perineural_invasion", true, 0.08, 0.0, 0.0},
      {"suboptimal_ln", true, 0.40, 0.0, 0.0},
  };
  // Sparse: age, CEA and lymph-node sampling carry the risk.
  s.beta = {0.0, 0.5, 0.0, 0.0, 0.0, 0.4, 0.0, 0.4};
  s.censoring_rate = 0.746;
  s.shift.baseline_scale_multiplier = 1.5;
  s.shift.mean_shift = {0.046, -8.0, -0.05, 0.6, 0.02, -0.376, 0.04, -0.1};
  s.shift.censoring_delta = 0.947 - 0.746;
  return s;
}

double calibrate_censoring(std::span<const double> event_times, std::span<const double> unit_exponentials,
                           double target) {
  if (event_times.size() != unit_exponentials.size() || event_times.empty()) {
    throw std::invalid_argument("calibrate_censoring: size mismatch");
  }
  if (target == 0.0) return 0.0;
  // censored_fraction is nondecreasing in the rate; bisect on log(rate).
  double lo = std::log(1e-12), hi = std::log(1e12);
  double best_rate = 0.0, best_gap = 1.0;
  for (int it = 0; it < kCalibrationIterations && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = censored_fraction(event_times, unit_exponentials, std::exp(mid));
    if (std::abs(f - target) < best_gap) {
      best_gap = std::abs(f - target);
      best_rate = std::exp(mid);
    }
    (f < target ? lo : hi) = mid;
  }
  if (best_gap > kCensoringTolerance) {
    throw std::runtime_error("synthetic: censoring rate " + std::to_string(target) + " unreachable (closest gap " +
                             std::to_string(best_gap) + ")");
  }
  return best_rate;
}

Cohort generate_synthetic_cohort(const SyntheticSpec& spec, std::size_t n, bool apply_shift, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw std::invalid_argument("synthetic: n must be positive");
  const std::size_t p = spec.covariates.size();
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> unit_exp(1.0);

  std::vector<double> x(n * p), z(p);
  std::vector<double> event_time(n), censor_draw(n);
  const double scale = spec.weibull_scale * (apply_shift ? spec.shift.baseline_scale_multiplier : 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = 0.0;
    for (std::size_t f = 0; f < p; ++f) {
      const auto& c = spec.covariates[f];
      const double mean = c.mean + (apply_shift ? shifted(spec.shift.mean_shift, f) : 0.0);
      double v;
      if (c.binary) {
        v = uniform01(rng) < std::clamp(mean, 0.0, 1.0) ? 1.0 : 0.0;
      } else {
        v = std::max(c.lower, mean + c.sd * normal(rng));
      }
      x[i * p + f] = v;
      const double ref_sd = c.binary ? std::sqrt(c.mean * (1.0 - c.mean)) : c.sd;
      const double b = spec.beta[f] + (apply_shift ? shifted(spec.shift.coefficient_shift, f) : 0.0);
      z[f] = (v - c.mean) / ref_sd;
      eta += b * z[f];
    }
    for (const auto& term : spec.interactions) eta += term.beta * (z[term.a] > 0.0 && z[term.b] > 0.0 ? 1.0 : 0.0);
    event_time[i] = scale * std::pow(unit_exp(rng) * std::exp(-eta), 1.0 / spec.weibull_shape);
    censor_draw[i] = unit_exp(rng);
  }

  const double target = spec.censoring_rate + (apply_shift ? spec.shift.censoring_delta : 0.0);
  const double rate = calibrate_censoring(event_time, censor_draw, target);
  std::vector<double> durations(n);
  std::vector<int> events(n);
  const double res = spec.time_resolution;
  for (std::size_t i = 0; i < n; ++i) {
    const bool censored = censor_draw[i] < rate * event_time[i];
    const double t = censored ? censor_draw[i] / rate : event_time[i];
    durations[i] = std::ceil(t * res) / res;
    events[i] = censored ? 0 : 1;
  }
  std::vector<std::string> names;
  for (const auto& c : spec.covariates) names.push_back(c.name);
  return Cohort(std::move(x), std::move(durations), std::move(events), std::move(names));
}

CohortPair generate_synthetic_pair(const SyntheticSpec& spec) {
  spec.validate();
  return {generate_synthetic_cohort(spec, spec.n_source, false, derive_seed(spec.rng_seed, "synthetic-source")),
          generate_synthetic_cohort(spec, spec.n_target, true, derive_seed(spec.rng_seed, "synthetic-target"))};
}

}  // namespace tsf::harness
