#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsf/core/random.hpp"

namespace tsf::nn {

// Loss value with its gradient with respect to the model outputs
// (scores for Cox losses, n x m bin probabilities for DeepHit).
struct LossValue {
  double value = 0.0;
  std::vector<double> grad;
};

// Negative log partial likelihood, Breslow ties:
//   sum_{i: event} [ log sum_{j: T_j >= T_i} exp(theta_j) - theta_i ].
// Throws std::invalid_argument("no events").
LossValue cox_nll(std::span<const double> scores, std::span<const double> durations,
                  std::span<const int> events);

// Case-control approximation. For each event i the risk set is replaced by
// {i} plus `control_size` controls drawn with replacement from R_i \ {i},
// each weighted (|R_i| - 1) / control_size so the control sum is unbiased
// for the full risk-set sum. `exhaustive` uses all of R_i \ {i} with unit
// weights, which reproduces cox_nll.
LossValue coxcc_nll(std::span<const double> scores, std::span<const double> durations,
                    std::span<const int> events, std::size_t control_size, Rng& rng,
                    bool exhaustive = false);

// Cut points 0 = tau_0 < tau_1 < ... < tau_m. A duration maps to the
// smallest k >= 1 with t <= tau_k; the last bin absorbs anything later.
class DiscreteTimeGrid {
 public:
  DiscreteTimeGrid() = default;
  explicit DiscreteTimeGrid(std::vector<double> cuts);

  // m equal-quantile cut points over the observed durations (deduplicated).
  static DiscreteTimeGrid from_quantiles(std::span<const double> durations, std::size_t m = 10);

  std::size_t n_bins() const { return cuts_.size() - 1; }
  const std::vector<double>& cuts() const { return cuts_; }
  // 1-based bin index in [1, m].
  std::size_t bin_of(double t) const;

  friend bool operator==(const DiscreteTimeGrid&, const DiscreteTimeGrid&) = default;

 private:
  std::vector<double> cuts_;
};

inline constexpr double kProbabilityFloor = 1e-12;

// -sum [ delta_i log y_{e_i}(x_i) + (1 - delta_i) log S(tau_{e_i} | x_i) ],
// S(tau_k | x) = 1 - sum_{kappa <= k} y_kappa. Probabilities are clamped at
// kProbabilityFloor before the log; the gradient is zero where clamped.
LossValue deephit_likelihood(std::span<const double> y, const DiscreteTimeGrid& grid,
                             std::span<const double> durations, std::span<const int> events);

// sum_{i,j} delta_i 1{T_i < T_j} exp((S(tau_{e_i}|x_i) - S(tau_{e_i}|x_j)) / sigma)
LossValue deephit_rank(std::span<const double> y, const DiscreteTimeGrid& grid,
                       std::span<const double> durations, std::span<const int> events, double sigma);

// alpha * likelihood + (1 - alpha) * rank. Throws if alpha is outside (0, 1).
double combine_deephit(double alpha, double likelihood, double rank);

LossValue deephit_loss(std::span<const double> y, const DiscreteTimeGrid& grid,
                       std::span<const double> durations, std::span<const int> events, double alpha,
                       double sigma);

}  // namespace tsf::nn
