#pragma once

#include <span>
#include <vector>

#include "admiral/rng.hpp"
#include "admiral/types.hpp"

namespace admiral {

/// Plain fully-connected network: rectifier hidden layers, identity output.
/// Weights of layer l are stored input-major (W[i*out+j]), which lets the
/// forward and weight-gradient loops skip zero input entries; one-hot state
/// encodings make the first layer effectively a column lookup.
///
/// forward() caches activations for the following backward(); gradients
/// accumulate across calls until sgd_step() or zero_grads().
class Mlp {
 public:
  explicit Mlp(std::vector<int> layer_sizes);

  /// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases.
  void init_random(Rng& rng);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }

  std::span<const double> forward(std::span<const double> input);

  /// dL/d(output) for the cached forward pass; accumulates into the
  /// gradient buffers.
  void backward(std::span<const double> output_grad);

  void zero_grads();
  void sgd_step(double learning_rate);

  /// Flat parameter vector: per layer, the weight block then the bias block.
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& grads() const { return grads_; }

  bool finite() const { return all_finite(params_); }

 private:
  struct Layer {
    int in = 0;
    int out = 0;
    std::size_t w_offset = 0;  // into params_/grads_
    std::size_t b_offset = 0;
  };

  std::vector<int> sizes_;
  std::vector<Layer> layers_;
  std::vector<double> params_;
  std::vector<double> grads_;
  std::vector<std::vector<double>> acts_;  // acts_[0] = input copy, acts_[L] = output
  std::vector<double> delta_a_;
  std::vector<double> delta_b_;
};

/// argmax over a span (first index wins ties).
int argmax_index(std::span<const double> values);

}  // namespace admiral
