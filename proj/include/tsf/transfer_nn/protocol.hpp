#pragma once

#include <string>

#include "tsf/core/cohort.hpp"
#include "tsf/nn/model.hpp"
#include "tsf/nn/train.hpp"

namespace tsf::nn {

enum class TransferMode { SourceOnly, FineTune, Retrain, TargetOnly };

std::string to_string(TransferMode mode);
TransferMode transfer_mode_from_string(const std::string& name);

struct TransferProtocol {
  TransferMode mode = TransferMode::FineTune;
  TrainConfig target_train;
  // Cox path: refit the Breslow baseline on the target after adaptation.
  bool refit_baseline = true;
  // Used by TargetOnly to build a fresh network.
  Architecture architecture;
  std::size_t deephit_bins = 10;
};

struct PretrainConfig {
  TrainConfig train;
  Architecture architecture;
  std::size_t deephit_bins = 10;
};

// Fits the standardizer (and DeepHit grid) on the source, trains, and
// attaches a source-fitted Breslow baseline for Cox losses.
NetworkModel pretrain(const Cohort& source, LossKind kind, const PretrainConfig& config);

// SourceOnly returns the model unchanged. FineTune updates only the output
// layer; Retrain updates everything starting from the pretrained weights;
// both keep the source standardizer and time grid. TargetOnly trains a fresh
// network standardized on the target.
NetworkModel adapt(const NetworkModel& pretrained, const Cohort& target, const TransferProtocol& protocol);

}  // namespace tsf::nn
