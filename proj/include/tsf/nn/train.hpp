#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsf/core/cohort.hpp"
#include "tsf/nn/losses.hpp"
#include "tsf/nn/network.hpp"

namespace tsf::nn {

enum class LossKind { DeepSurv, CoxCC, DeepHit };
enum class Optimizer { Sgd, Momentum };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  std::uint64_t rng_seed = 0;
  std::size_t control_size = 1;  // Cox-CC controls per case
  double sigma = 0.1;            // DeepHit ranking scale
  double alpha = 0.2;            // DeepHit likelihood weight
  Optimizer optimizer = Optimizer::Momentum;
  double momentum = 0.9;

  void validate() const;
};

class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(std::size_t epoch)
      : std::runtime_error("diverged at epoch " + std::to_string(epoch)), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

// Mini-batch objective minimized by `train`:
//   DeepSurv / Cox-CC: loss / (events in batch); batches without events
//   contribute nothing.
//   DeepHit: alpha * likelihood / n + (1 - alpha) * rank / n^2.
struct Objective {
  double value = 0.0;
  std::vector<DenseLayer> grads;  // same shapes as the network layers
  bool has_signal = true;         // false when the batch carries no events (Cox)
};

// x is batch x input_width. `rng` drives Cox-CC control sampling only.
Objective evaluate_objective(const SurvivalNetwork& net, std::span<const double> x, std::span<const double> durations,
                             std::span<const int> events, LossKind kind, const TrainConfig& config,
                             const DiscreteTimeGrid* grid, Rng& rng);

struct TrainResult {
  SurvivalNetwork net;
  std::vector<double> loss_trace;  // mean batch objective per epoch
};

// Mini-batch training on the cohort's covariates as given. With
// ParameterSet::OutputOnly the hidden layers are never written.
// Throws TrainingDiverged on a non-finite objective.
TrainResult train(SurvivalNetwork net, const Cohort& cohort, LossKind kind, const TrainConfig& config,
                  const DiscreteTimeGrid* grid = nullptr, ParameterSet trainable = ParameterSet::All);

}  // namespace tsf::nn
