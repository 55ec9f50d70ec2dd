#include "tsf/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsf::nn {

Standardizer Standardizer::fit(const Cohort& cohort) {
  const std::size_t n = cohort.n_subjects();
  const std::size_t p = cohort.n_features();
  Standardizer s;
  s.mean.assign(p, 0.0);
  s.scale.assign(p, 1.0);
  for (std::size_t f = 0; f < p; ++f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += cohort.value(i, f);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (cohort.value(i, f) - mean) * (cohort.value(i, f) - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    s.mean[f] = mean;
    s.scale[f] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t n_features) {
  return Standardizer{std::vector<double>(n_features, 0.0), std::vector<double>(n_features, 1.0)};
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) throw std::invalid_argument("standardizer: feature width mismatch");
  std::vector<double> out(x.size());
  for (std::size_t f = 0; f < x.size(); ++f) out[f] = (x[f] - mean[f]) / scale[f];
  return out;
}

Cohort Standardizer::apply(const Cohort& cohort) const {
  std::vector<double> x;
  x.reserve(cohort.covariates().size());
  for (std::size_t i = 0; i < cohort.n_subjects(); ++i) {
    const auto row = apply(cohort.row(i));
    x.insert(x.end(), row.begin(), row.end());
  }
  return Cohort(std::move(x), cohort.durations(), cohort.events(), cohort.feature_names());
}

SurvivalNetwork make_network(std::size_t n_features, LossKind kind, const Architecture& arch,
                             const DiscreteTimeGrid* grid, std::uint64_t seed) {
  std::vector<std::size_t> sizes{n_features};
  sizes.insert(sizes.end(), arch.hidden.begin(), arch.hidden.end());
  if (kind == LossKind::DeepHit) {
    if (!grid) throw std::invalid_argument("make_network: DeepHit needs a time grid");
    sizes.push_back(grid->n_bins());
    return SurvivalNetwork(sizes, arch.activation, OutputHead::Softmax, seed);
  }
  sizes.push_back(1);
  return SurvivalNetwork(sizes, arch.activation, OutputHead::Linear, seed);
}

StepFunction breslow_baseline(std::span<const double> scores, std::span<const double> durations,
                              std::span<const int> events) {
  const std::size_t n = scores.size();
  if (durations.size() != n || events.size() != n) throw std::invalid_argument("breslow: inputs not aligned");
  if (n == 0) throw std::invalid_argument("empty cohort");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return durations[a] < durations[b]; });
  const double shift = *std::max_element(scores.begin(), scores.end());

  // Risk-set sums of exp(theta - shift), walking back from the latest time.
  std::vector<double> times;
  std::vector<double> deaths;
  std::vector<double> risk;
  double running = 0.0;
  std::size_t k = n;
  while (k > 0) {
    const double t = durations[order[k - 1]];
    double d = 0.0;
    while (k > 0 && durations[order[k - 1]] == t) {
      --k;
      running += std::exp(scores[order[k]] - shift);
      d += events[order[k]] == 1 ? 1.0 : 0.0;
    }
    if (d > 0.0) {
      times.push_back(t);
      deaths.push_back(d);
      risk.push_back(running);
    }
  }
  std::reverse(times.begin(), times.end());
  std::reverse(deaths.begin(), deaths.end());
  std::reverse(risk.begin(), risk.end());
  const double unshift = std::exp(-shift);
  std::vector<double> values(times.size());
  double h = 0.0;
  for (std::size_t l = 0; l < times.size(); ++l) {
    h += deaths[l] / risk[l];
    values[l] = shift == 0.0 ? h : h * unshift;
  }
  return StepFunction(std::move(times), std::move(values), 0.0);
}

StepFunction predict_survival(const SurvivalNetwork& net, std::span<const double> x, const StepFunction* baseline,
                              const DiscreteTimeGrid* grid) {
  const std::vector<double> out = net.forward(x);
  if (net.head() == OutputHead::Softmax) {
    if (!grid) throw std::invalid_argument("predict_survival: DeepHit path needs the time grid");
    const std::size_t m = grid->n_bins();
    if (out.size() != m) throw std::invalid_argument("predict_survival: grid does not match network output");
    std::vector<double> knots(grid->cuts().begin() + 1, grid->cuts().end());
    std::vector<double> values(m);
    double cdf = 0.0;
    double prev = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      cdf += out[k];
      prev = std::min(prev, std::clamp(1.0 - cdf, 0.0, 1.0));
      values[k] = prev;
    }
    return StepFunction(std::move(knots), std::move(values), 1.0);
  }
  if (!baseline) throw std::invalid_argument("predict_survival: Cox path needs a baseline hazard");
  const double relative_risk = std::exp(out[0]);
  std::vector<double> values(baseline->size());
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = std::exp(-baseline->values()[j] * relative_risk);
  return StepFunction(baseline->knots(), std::move(values), std::exp(-baseline->initial_value() * relative_risk));
}

StepFunction predict_survival(const NetworkModel& model, std::span<const double> raw_x) {
  const auto x = model.scaler.apply(raw_x);
  return predict_survival(model.net, x, model.baseline ? &*model.baseline : nullptr,
                          model.grid ? &*model.grid : nullptr);
}

void refit_baseline(NetworkModel& model, const Cohort& cohort) {
  if (model.kind == LossKind::DeepHit) return;
  std::vector<double> scores(cohort.n_subjects());
  for (std::size_t i = 0; i < cohort.n_subjects(); ++i) {
    scores[i] = model.net.forward(model.scaler.apply(cohort.row(i)))[0];
  }
  model.baseline = breslow_baseline(scores, cohort.durations(), cohort.events());
}

}  // namespace tsf::nn
