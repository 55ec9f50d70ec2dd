#include "tsf/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsf/simd/kernels.hpp"

namespace tsf::nn {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::DeepSurv: return "deepsurv";
    case LossKind::CoxCC: return "coxcc";
    case LossKind::DeepHit: return "deephit";
  }
  return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "deepsurv") return LossKind::DeepSurv;
  if (name == "coxcc") return LossKind::CoxCC;
  if (name == "deephit") return LossKind::DeepHit;
  throw std::invalid_argument("unknown loss kind: " + name);
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("train: learning rate must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
  if (control_size < 1) throw std::invalid_argument("train: control size must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("train: sigma must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("train: alpha must lie in (0, 1)");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("train: momentum must lie in [0, 1)");
}

Objective evaluate_objective(const SurvivalNetwork& net, std::span<const double> x, std::span<const double> durations,
                             std::span<const int> events, LossKind kind, const TrainConfig& config,
                             const DiscreteTimeGrid* grid, Rng& rng) {
  const std::size_t batch = durations.size();
  const ForwardCache cache = forward_batch(net, x, batch);
  Objective obj;
  std::vector<double> grad_out;
  if (kind == LossKind::DeepHit) {
    if (!grid) throw std::invalid_argument("train: DeepHit needs a time grid");
    if (net.output_width() != grid->n_bins() || net.head() != OutputHead::Softmax) {
      throw std::invalid_argument("train: DeepHit head must be a softmax over the grid bins");
    }
    const auto n = static_cast<double>(batch);
    const LossValue lik = deephit_likelihood(cache.output, *grid, durations, events);
    const LossValue rank = deephit_rank(cache.output, *grid, durations, events, config.sigma);
    const double a = config.alpha / n;
    const double r = (1.0 - config.alpha) / (n * n);
    obj.value = a * lik.value + r * rank.value;
    grad_out.resize(lik.grad.size());
    for (std::size_t k = 0; k < grad_out.size(); ++k) grad_out[k] = a * lik.grad[k] + r * rank.grad[k];
  } else {
    if (net.output_width() != 1 || net.head() != OutputHead::Linear) {
      throw std::invalid_argument("train: Cox losses need a single linear output");
    }
    const auto n_events = static_cast<double>(std::count(events.begin(), events.end(), 1));
    if (n_events == 0.0) {
      obj.has_signal = false;
      for (const auto& layer : net.layers()) obj.grads.emplace_back(layer.in, layer.out);
      return obj;
    }
    const LossValue loss = kind == LossKind::DeepSurv
                               ? cox_nll(cache.output, durations, events)
                               : coxcc_nll(cache.output, durations, events, config.control_size, rng);
    obj.value = loss.value / n_events;
    grad_out.resize(loss.grad.size());
    for (std::size_t k = 0; k < grad_out.size(); ++k) grad_out[k] = loss.grad[k] / n_events;
  }
  obj.grads = backward(net, cache, grad_out);
  return obj;
}

TrainResult train(SurvivalNetwork net, const Cohort& cohort, LossKind kind, const TrainConfig& config,
                  const DiscreteTimeGrid* grid, ParameterSet trainable) {
  config.validate();
  if (cohort.n_features() != net.input_width()) throw std::invalid_argument("train: feature width mismatch");
  if (kind != LossKind::DeepHit && cohort.n_subjects() < 2) {
    throw std::invalid_argument("train: Cox losses need at least 2 subjects");
  }
  const std::size_t n = cohort.n_subjects();
  const std::size_t batch_size = std::min(config.batch_size, n);
  Rng rng = make_rng(config.rng_seed);

  auto& layers = net.layers();
  const std::size_t first_trainable = trainable == ParameterSet::All ? 0 : layers.size() - 1;
  std::vector<DenseLayer> velocity;
  for (const auto& layer : layers) velocity.emplace_back(layer.in, layer.out);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> xb;
  std::vector<double> tb;
  std::vector<int> eb;
  TrainResult result;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t stop = std::min(n, start + batch_size);
      xb.clear();
      tb.clear();
      eb.clear();
      for (std::size_t k = start; k < stop; ++k) {
        auto row = cohort.row(order[k]);
        xb.insert(xb.end(), row.begin(), row.end());
        tb.push_back(cohort.durations()[order[k]]);
        eb.push_back(cohort.events()[order[k]]);
      }
      Objective obj = evaluate_objective(net, xb, tb, eb, kind, config, grid, rng);
      if (!std::isfinite(obj.value)) throw TrainingDiverged(epoch);
      if (!obj.has_signal) continue;
      epoch_loss += obj.value;
      ++n_batches;
      for (std::size_t l = first_trainable; l < layers.size(); ++l) {
        auto& layer = layers[l];
        auto& g = obj.grads[l];
        if (config.optimizer == Optimizer::Momentum) {
          auto& v = velocity[l];
          simd::scale(config.momentum, v.weights);
          simd::accumulate(g.weights, v.weights);
          simd::scale(config.momentum, v.bias);
          simd::accumulate(g.bias, v.bias);
          simd::axpy(-config.learning_rate, v.weights, layer.weights);
          simd::axpy(-config.learning_rate, v.bias, layer.bias);
        } else {
          simd::axpy(-config.learning_rate, g.weights, layer.weights);
          simd::axpy(-config.learning_rate, g.bias, layer.bias);
        }
      }
    }
    const double mean = n_batches > 0 ? epoch_loss / static_cast<double>(n_batches) : 0.0;
    if (!std::isfinite(mean)) throw TrainingDiverged(epoch);
    for (const auto& layer : layers) {
      for (double w : layer.weights) {
        if (!std::isfinite(w)) throw TrainingDiverged(epoch);
      }
    }
    result.loss_trace.push_back(mean);
  }
  result.net = std::move(net);
  return result;
}

}  // namespace tsf::nn
