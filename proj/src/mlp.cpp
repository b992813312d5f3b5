#include "admiral/mlp.hpp"

#include <algorithm>
#include <cmath>

namespace admiral {

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw ConfigError("network needs an input and an output layer");
  for (int s : sizes_)
    if (s <= 0) throw ConfigError("layer sizes must be positive");

  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    Layer layer;
    layer.in = sizes_[l];
    layer.out = sizes_[l + 1];
    layer.w_offset = offset;
    offset += static_cast<std::size_t>(layer.in) * layer.out;
    layer.b_offset = offset;
    offset += layer.out;
    layers_.push_back(layer);
  }
  params_.assign(offset, 0.0);
  grads_.assign(offset, 0.0);
  acts_.resize(sizes_.size());
  for (std::size_t l = 0; l < sizes_.size(); ++l) acts_[l].assign(sizes_[l], 0.0);
  delta_a_.assign(*std::max_element(sizes_.begin(), sizes_.end()), 0.0);
  delta_b_.assign(delta_a_.size(), 0.0);
}

void Mlp::init_random(Rng& rng) {
  for (const Layer& layer : layers_) {
    double scale = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (int i = 0; i < layer.in * layer.out; ++i)
      params_[layer.w_offset + i] = (2.0 * rng.uniform() - 1.0) * scale;
    for (int j = 0; j < layer.out; ++j) params_[layer.b_offset + j] = 0.0;
  }
}

std::span<const double> Mlp::forward(std::span<const double> input) {
  if (static_cast<int>(input.size()) != input_size())
    throw ConfigError("network input length mismatch");
  std::copy(input.begin(), input.end(), acts_[0].begin());

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const double* w = params_.data() + layer.w_offset;
    const double* b = params_.data() + layer.b_offset;
    const std::vector<double>& x = acts_[l];
    std::vector<double>& y = acts_[l + 1];
    for (int j = 0; j < layer.out; ++j) y[j] = b[j];
    for (int i = 0; i < layer.in; ++i) {
      double xi = x[i];
      if (xi == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(i) * layer.out;
      for (int j = 0; j < layer.out; ++j) y[j] += row[j] * xi;
    }
    if (l + 1 < layers_.size()) {
      for (int j = 0; j < layer.out; ++j)
        if (y[j] < 0.0) y[j] = 0.0;  // rectifier on hidden layers
    }
  }
  return acts_.back();
}

void Mlp::backward(std::span<const double> output_grad) {
  if (static_cast<int>(output_grad.size()) != output_size())
    throw ConfigError("network output gradient length mismatch");

  // delta_a_ holds dL/dz of the current layer
  std::copy(output_grad.begin(), output_grad.end(), delta_a_.begin());

  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    double* gw = grads_.data() + layer.w_offset;
    double* gb = grads_.data() + layer.b_offset;
    const std::vector<double>& x = acts_[l];

    for (int j = 0; j < layer.out; ++j) gb[j] += delta_a_[j];
    for (int i = 0; i < layer.in; ++i) {
      double xi = x[i];
      if (xi == 0.0) continue;
      double* row = gw + static_cast<std::size_t>(i) * layer.out;
      for (int j = 0; j < layer.out; ++j) row[j] += delta_a_[j] * xi;
    }

    if (l == 0) break;
    const double* w = params_.data() + layer.w_offset;
    for (int i = 0; i < layer.in; ++i) delta_b_[i] = 0.0;
    for (int j = 0; j < layer.out; ++j) {
      double dj = delta_a_[j];
      if (dj == 0.0) continue;
      for (int i = 0; i < layer.in; ++i) delta_b_[i] += w[static_cast<std::size_t>(i) * layer.out + j] * dj;
    }
    // rectifier gate of the previous layer: x <= 0 means the unit was off
    for (int i = 0; i < layer.in; ++i) delta_a_[i] = x[i] > 0.0 ? delta_b_[i] : 0.0;
  }
}

void Mlp::zero_grads() { std::fill(grads_.begin(), grads_.end(), 0.0); }

void Mlp::sgd_step(double learning_rate) {
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= learning_rate * grads_[i];
  zero_grads();
}

int argmax_index(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace admiral
