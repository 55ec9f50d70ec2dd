#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tsf/core/cohort.hpp"
#include "tsf/core/step_function.hpp"
#include "tsf/nn/losses.hpp"
#include "tsf/nn/network.hpp"
#include "tsf/nn/train.hpp"

namespace tsf::nn {

// Per-feature centering and scaling learned on one cohort.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Cohort& cohort);
  static Standardizer identity(std::size_t n_features);
  std::vector<double> apply(std::span<const double> x) const;
  Cohort apply(const Cohort& cohort) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

// A trained network together with what it needs to produce survival
// curves: the input standardizer and either a Breslow baseline cumulative
// hazard (Cox losses) or the discrete time grid (DeepHit).
struct NetworkModel {
  LossKind kind = LossKind::DeepSurv;
  SurvivalNetwork net;
  Standardizer scaler;
  std::optional<StepFunction> baseline;
  std::optional<DiscreteTimeGrid> grid;

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

struct Architecture {
  std::vector<std::size_t> hidden{32};
  Activation activation = Activation::Relu;
};

SurvivalNetwork make_network(std::size_t n_features, LossKind kind, const Architecture& arch,
                             const DiscreteTimeGrid* grid, std::uint64_t seed);

// Breslow estimator: H0(t) = sum_{t_l <= t} d_l / sum_{j: T_j >= t_l} exp(theta_j).
StepFunction breslow_baseline(std::span<const double> scores, std::span<const double> durations,
                              std::span<const int> events);

// Cox path: S(t | x) = exp(-H0(t) exp(theta(x))). DeepHit path:
// S(tau_k | x) = 1 - sum_{kappa <= k} y_kappa(x) on the grid cut points.
// `x` must already be standardized.
StepFunction predict_survival(const SurvivalNetwork& net, std::span<const double> x,
                              const StepFunction* baseline, const DiscreteTimeGrid* grid);

// Applies the model's standardizer to raw covariates first.
StepFunction predict_survival(const NetworkModel& model, std::span<const double> raw_x);

// Refit the Breslow baseline on `cohort` (raw covariates).
void refit_baseline(NetworkModel& model, const Cohort& cohort);

}  // namespace tsf::nn
