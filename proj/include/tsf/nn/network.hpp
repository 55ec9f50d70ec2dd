#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tsf::nn {

enum class Activation { Relu, Tanh };
enum class OutputHead { Linear, Softmax };

// Fully connected layer, weights row-major (out x in).
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_width, std::size_t out_width)
      : in(in_width), out(out_width), weights(in_width * out_width, 0.0), bias(out_width, 0.0) {}

  std::span<const double> row(std::size_t o) const { return {weights.data() + o * in, in}; }
  std::span<double> row(std::size_t o) { return {weights.data() + o * in, in}; }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Which parameters an optimizer step may touch. The last layer is the
// output layer (beta and output bias); everything before it is hidden.
enum class ParameterSet { All, OutputOnly };

// Feed-forward network: hidden layers with `activation`, then a linear
// output layer, optionally followed by a softmax over the outputs.
class SurvivalNetwork {
 public:
  SurvivalNetwork() = default;
  // layer_sizes = {inputs, hidden..., outputs}. Weights drawn from `seed`
  // (He-uniform for hidden layers, Glorot-uniform for the output layer).
  SurvivalNetwork(std::vector<std::size_t> layer_sizes, Activation activation, OutputHead head,
                  std::uint64_t seed);
  SurvivalNetwork(std::vector<DenseLayer> layers, Activation activation, OutputHead head);

  std::size_t input_width() const { return layers_.front().in; }
  std::size_t output_width() const { return layers_.back().out; }
  std::vector<std::size_t> layer_sizes() const;
  Activation activation() const { return activation_; }
  OutputHead head() const { return head_; }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const DenseLayer& output_layer() const { return layers_.back(); }

  // Throws std::invalid_argument on width mismatch.
  std::vector<double> forward(std::span<const double> x) const;

  std::size_t n_parameters() const;
  // Layer by layer: weights then bias.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  friend bool operator==(const SurvivalNetwork&, const SurvivalNetwork&) = default;

 private:
  std::vector<DenseLayer> layers_;
  Activation activation_ = Activation::Relu;
  OutputHead head_ = OutputHead::Linear;
};

// Activations retained by a batch forward pass for backpropagation.
struct ForwardCache {
  std::size_t batch = 0;
  // inputs[l] is the (batch x layers[l].in) input to layer l; pre[l] its
  // pre-activation (batch x layers[l].out).
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;
  std::vector<double> output;  // batch x output_width, after the head
};

// x is batch x input_width, row-major.
ForwardCache forward_batch(const SurvivalNetwork& net, std::span<const double> x, std::size_t batch);

// Gradients of a scalar objective with respect to every parameter, given
// d objective / d output (batch x output_width, after the head).
std::vector<DenseLayer> backward(const SurvivalNetwork& net, const ForwardCache& cache,
                                 std::span<const double> grad_output);

void softmax_inplace(std::span<double> z);

}  // namespace tsf::nn
