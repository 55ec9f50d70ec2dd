#include "tsf/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsf/core/random.hpp"
#include "tsf/simd/kernels.hpp"

namespace tsf::nn {

namespace {

double activate(Activation a, double z) { return a == Activation::Relu ? (z > 0.0 ? z : 0.0) : std::tanh(z); }

double activate_grad(Activation a, double z) {
  if (a == Activation::Relu) return z > 0.0 ? 1.0 : 0.0;
  const double t = std::tanh(z);
  return 1.0 - t * t;
}

}  // namespace

void softmax_inplace(std::span<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

SurvivalNetwork::SurvivalNetwork(std::vector<std::size_t> sizes, Activation activation, OutputHead head,
                                 std::uint64_t seed)
    : activation_(activation), head_(head) {
  if (sizes.size() < 2) throw std::invalid_argument("network needs input and output widths");
  for (std::size_t s : sizes) {
    if (s == 0) throw std::invalid_argument("network layer widths must be positive");
  }
  Rng rng = make_rng(seed);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer layer(sizes[l], sizes[l + 1]);
    const bool is_output = l + 2 == sizes.size();
    const double limit = is_output ? std::sqrt(6.0 / static_cast<double>(layer.in + layer.out))
                                   : std::sqrt(6.0 / static_cast<double>(layer.in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : layer.weights) w = dist(rng);
    layers_.push_back(std::move(layer));
  }
}

SurvivalNetwork::SurvivalNetwork(std::vector<DenseLayer> layers, Activation activation, OutputHead head)
    : layers_(std::move(layers)), activation_(activation), head_(head) {
  if (layers_.empty()) throw std::invalid_argument("network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
      throw std::invalid_argument("network: layer parameter shape mismatch");
    }
    if (l > 0 && layers_[l - 1].out != layer.in) throw std::invalid_argument("network: layer widths do not chain");
  }
}

std::vector<std::size_t> SurvivalNetwork::layer_sizes() const {
  std::vector<std::size_t> sizes{layers_.front().in};
  for (const auto& layer : layers_) sizes.push_back(layer.out);
  return sizes;
}

std::vector<double> SurvivalNetwork::forward(std::span<const double> x) const {
  if (x.size() != input_width()) throw std::invalid_argument("network: input width mismatch");
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    std::vector<double> z(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) z[o] = simd::dot(layer.row(o), a) + layer.bias[o];
    if (l + 1 < layers_.size()) {
      for (double& v : z) v = activate(activation_, v);
    }
    a = std::move(z);
  }
  if (head_ == OutputHead::Softmax) softmax_inplace(a);
  return a;
}

std::size_t SurvivalNetwork::n_parameters() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

std::vector<double> SurvivalNetwork::flatten() const {
  std::vector<double> flat;
  flat.reserve(n_parameters());
  for (const auto& layer : layers_) {
    flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
    flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
  }
  return flat;
}

void SurvivalNetwork::assign(std::span<const double> flat) {
  if (flat.size() != n_parameters()) throw std::invalid_argument("network: parameter count mismatch");
  std::size_t k = 0;
  for (auto& layer : layers_) {
    for (double& w : layer.weights) w = flat[k++];
    for (double& b : layer.bias) b = flat[k++];
  }
}

ForwardCache forward_batch(const SurvivalNetwork& net, std::span<const double> x, std::size_t batch) {
  if (x.size() != batch * net.input_width()) throw std::invalid_argument("network: batch input shape mismatch");
  const auto& layers = net.layers();
  ForwardCache cache;
  cache.batch = batch;
  cache.inputs.resize(layers.size());
  cache.pre.resize(layers.size());
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    std::vector<double> z(batch * layer.out);
    for (std::size_t b = 0; b < batch; ++b) {
      std::span<const double> in(a.data() + b * layer.in, layer.in);
      for (std::size_t o = 0; o < layer.out; ++o) z[b * layer.out + o] = simd::dot(layer.row(o), in) + layer.bias[o];
    }
    cache.inputs[l] = std::move(a);
    a = z;
    if (l + 1 < layers.size()) {
      for (double& v : a) v = activate(net.activation(), v);
    }
    cache.pre[l] = std::move(z);
  }
  if (net.head() == OutputHead::Softmax) {
    const std::size_t m = net.output_width();
    for (std::size_t b = 0; b < batch; ++b) softmax_inplace(std::span<double>(a.data() + b * m, m));
  }
  cache.output = std::move(a);
  return cache;
}

std::vector<DenseLayer> backward(const SurvivalNetwork& net, const ForwardCache& cache,
                                 std::span<const double> grad_output) {
  const auto& layers = net.layers();
  const std::size_t batch = cache.batch;
  const std::size_t m = net.output_width();
  if (grad_output.size() != batch * m) throw std::invalid_argument("backward: gradient shape mismatch");

  std::vector<DenseLayer> grads;
  grads.reserve(layers.size());
  for (const auto& layer : layers) grads.emplace_back(layer.in, layer.out);

  // d objective / d pre-activation of the output layer
  std::vector<double> delta(grad_output.begin(), grad_output.end());
  if (net.head() == OutputHead::Softmax) {
    for (std::size_t b = 0; b < batch; ++b) {
      const double* y = cache.output.data() + b * m;
      double* d = delta.data() + b * m;
      double inner = 0.0;
      for (std::size_t k = 0; k < m; ++k) inner += d[k] * y[k];
      for (std::size_t k = 0; k < m; ++k) d[k] = y[k] * (d[k] - inner);
    }
  }

  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    auto& g = grads[l];
    std::vector<double> delta_prev(l > 0 ? batch * layer.in : 0, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
      std::span<const double> in(cache.inputs[l].data() + b * layer.in, layer.in);
      const double* d = delta.data() + b * layer.out;
      for (std::size_t o = 0; o < layer.out; ++o) {
        if (d[o] == 0.0) continue;
        simd::axpy(d[o], in, g.row(o));
        g.bias[o] += d[o];
        if (l > 0) simd::axpy(d[o], layer.row(o), std::span<double>(delta_prev.data() + b * layer.in, layer.in));
      }
    }
    if (l > 0) {
      const auto& z = cache.pre[l - 1];
      for (std::size_t k = 0; k < delta_prev.size(); ++k) delta_prev[k] *= activate_grad(net.activation(), z[k]);
      delta = std::move(delta_prev);
    }
  }
  return grads;
}

}  // namespace tsf::nn
