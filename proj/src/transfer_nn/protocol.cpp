#include "tsf/transfer_nn/protocol.hpp"

#include <stdexcept>

namespace tsf::nn {

std::string to_string(TransferMode mode) {
  switch (mode) {
    case TransferMode::SourceOnly: return "source";
    case TransferMode::FineTune: return "finetune";
    case TransferMode::Retrain: return "retrain";
    case TransferMode::TargetOnly: return "target";
  }
  return "unknown";
}

TransferMode transfer_mode_from_string(const std::string& name) {
  if (name == "source") return TransferMode::SourceOnly;
  if (name == "finetune" || name == "ft") return TransferMode::FineTune;
  if (name == "retrain" || name == "rt") return TransferMode::Retrain;
  if (name == "target") return TransferMode::TargetOnly;
  throw std::invalid_argument("unknown transfer mode: " + name);
}

NetworkModel pretrain(const Cohort& source, LossKind kind, const PretrainConfig& config) {
  NetworkModel model;
  model.kind = kind;
  model.scaler = Standardizer::fit(source);
  const Cohort scaled = model.scaler.apply(source);
  if (kind == LossKind::DeepHit) model.grid = DiscreteTimeGrid::from_quantiles(source.durations(), config.deephit_bins);
  SurvivalNetwork init = make_network(source.n_features(), kind, config.architecture,
                                      model.grid ? &*model.grid : nullptr,
                                      derive_seed(config.train.rng_seed, "init"));
  model.net = train(std::move(init), scaled, kind, config.train, model.grid ? &*model.grid : nullptr).net;
  refit_baseline(model, source);
  return model;
}

NetworkModel adapt(const NetworkModel& pretrained, const Cohort& target, const TransferProtocol& protocol) {
  if (target.n_features() != pretrained.net.input_width()) {
    throw std::invalid_argument("adapt: feature width mismatch");
  }
  if (protocol.mode == TransferMode::SourceOnly) return pretrained;

  NetworkModel model;
  model.kind = pretrained.kind;
  if (protocol.mode == TransferMode::TargetOnly) {
    model.scaler = Standardizer::fit(target);
    if (model.kind == LossKind::DeepHit) {
      model.grid = DiscreteTimeGrid::from_quantiles(target.durations(), protocol.deephit_bins);
    }
    model.net = make_network(target.n_features(), model.kind, protocol.architecture,
                             model.grid ? &*model.grid : nullptr,
                             derive_seed(protocol.target_train.rng_seed, "init"));
  } else {
    model.scaler = pretrained.scaler;
    model.grid = pretrained.grid;
    model.net = pretrained.net;
    model.baseline = pretrained.baseline;
  }
  const ParameterSet trainable =
      protocol.mode == TransferMode::FineTune ? ParameterSet::OutputOnly : ParameterSet::All;
  const Cohort scaled = model.scaler.apply(target);
  if (protocol.target_train.epochs > 0) {
    model.net = train(std::move(model.net), scaled, model.kind, protocol.target_train,
                      model.grid ? &*model.grid : nullptr, trainable)
                    .net;
  }
  if (protocol.refit_baseline || protocol.mode == TransferMode::TargetOnly) refit_baseline(model, target);
  return model;
}

}  // namespace tsf::nn
