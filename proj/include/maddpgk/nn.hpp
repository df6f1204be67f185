// Copyright 2026 The maddpgk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense feedforward networks with hand-written backpropagation, Adam and
// Polyak averaging. Batches are stored column-wise: an input batch is an
// (input_size x batch) matrix and every column is one sample.

#ifndef MADDPGK_NN_HPP_
#define MADDPGK_NN_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "maddpgk/errors.hpp"

namespace maddpgk::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Activation { kIdentity, kRelu, kLogistic };

inline const char* activation_name(Activation activation) {
  switch (activation) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kLogistic: return "logistic";
  }
  return "identity";
}

inline Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  if (name == "logistic") return Activation::kLogistic;
  throw ConfigError("unknown activation '" + name + "'");
}

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weight;  // out x in
  Vector<Scalar> bias;    // out
  Activation activation = Activation::kIdentity;

  Eigen::Index input_size() const { return weight.cols(); }
  Eigen::Index output_size() const { return weight.rows(); }
};

template <typename Scalar>
struct MlpParameters {
  std::vector<DenseLayer<Scalar>> layers;

  Eigen::Index input_size() const {
    return layers.empty() ? 0 : layers.front().input_size();
  }
  Eigen::Index output_size() const {
    return layers.empty() ? 0 : layers.back().output_size();
  }
  Eigen::Index parameter_count() const {
    Eigen::Index count = 0;
    for (const auto& layer : layers) count += layer.weight.size() + layer.bias.size();
    return count;
  }
};

template <typename Scalar>
struct LayerGradient {
  Matrix<Scalar> weight;
  Vector<Scalar> bias;
};

template <typename Scalar>
struct GradientSet {
  std::vector<LayerGradient<Scalar>> layers;
};

template <typename Scalar>
struct AdamState {
  GradientSet<Scalar> first_moment;
  GradientSet<Scalar> second_moment;
  std::int64_t step = 0;
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Activations of every layer for one batched forward pass; entry 0 is the
// input batch and entry i is the output of layer i-1.
template <typename Scalar>
struct ForwardTrace {
  std::vector<Matrix<Scalar>> activations;
};

template <typename Scalar>
struct BackwardResult {
  GradientSet<Scalar> gradients;
  Matrix<Scalar> input_gradient;
};

namespace detail {

template <typename Derived>
void apply_activation(Activation activation, Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  switch (activation) {
    case Activation::kIdentity:
      break;
    case Activation::kRelu:
      values = values.cwiseMax(Scalar(0));
      break;
    case Activation::kLogistic:
      values = values.unaryExpr([](Scalar z) { return Scalar(1) / (Scalar(1) + std::exp(-z)); });
      break;
  }
}

// Multiplies the upstream gradient in place by the activation derivative,
// expressed through the activation output.
template <typename Scalar>
void scale_by_derivative(Activation activation, const Matrix<Scalar>& output,
                         Matrix<Scalar>& delta) {
  switch (activation) {
    case Activation::kIdentity:
      break;
    case Activation::kRelu:
      delta = (output.array() > Scalar(0)).select(delta, Scalar(0));
      break;
    case Activation::kLogistic:
      delta.array() *= output.array() * (Scalar(1) - output.array());
      break;
  }
}

template <typename Scalar>
void require_same_shape(const MlpParameters<Scalar>& a, const GradientSet<Scalar>& b,
                        const char* what) {
  if (a.layers.size() != b.layers.size()) {
    throw ConfigError(std::string(what) + ": layer count mismatch");
  }
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].weight.rows() != b.layers[i].weight.rows() ||
        a.layers[i].weight.cols() != b.layers[i].weight.cols() ||
        a.layers[i].bias.size() != b.layers[i].bias.size()) {
      throw ConfigError(std::string(what) + ": shape mismatch at layer " + std::to_string(i));
    }
  }
}

}  // namespace detail

template <typename Scalar>
bool same_shape(const MlpParameters<Scalar>& a, const MlpParameters<Scalar>& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].weight.rows() != b.layers[i].weight.rows() ||
        a.layers[i].weight.cols() != b.layers[i].weight.cols() ||
        a.layers[i].bias.size() != b.layers[i].bias.size() ||
        a.layers[i].activation != b.layers[i].activation) {
      return false;
    }
  }
  return true;
}

// Checks chaining of layer shapes and finiteness of every entry.
template <typename Scalar>
void validate(const MlpParameters<Scalar>& params) {
  if (params.layers.empty()) throw ConfigError("network has no layers");
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& layer = params.layers[i];
    if (layer.bias.size() != layer.weight.rows()) {
      throw ConfigError("bias size does not match weight rows at layer " + std::to_string(i));
    }
    if (i > 0 && layer.input_size() != params.layers[i - 1].output_size()) {
      throw ConfigError("layer " + std::to_string(i) + " does not chain with its predecessor");
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
      throw ConfigError("non-finite parameter at layer " + std::to_string(i));
    }
  }
}

// Builds a network with `hidden` rectifier layers followed by an output layer
// with `output_activation`. Weights are uniform in +-1/sqrt(fan_in), biases 0.
template <typename Scalar, typename Rng>
MlpParameters<Scalar> make_mlp(Eigen::Index input_size, const std::vector<int>& hidden,
                               Eigen::Index output_size, Activation output_activation,
                               Rng& rng) {
  if (input_size <= 0 || output_size <= 0) throw ConfigError("network sizes must be positive");
  MlpParameters<Scalar> params;
  Eigen::Index fan_in = input_size;
  auto add_layer = [&](Eigen::Index out, Activation activation) {
    if (out <= 0) throw ConfigError("hidden width must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    DenseLayer<Scalar> layer;
    layer.weight.resize(out, fan_in);
    for (Eigen::Index c = 0; c < fan_in; ++c) {
      for (Eigen::Index r = 0; r < out; ++r) layer.weight(r, c) = static_cast<Scalar>(uniform(rng));
    }
    layer.bias = Vector<Scalar>::Zero(out);
    layer.activation = activation;
    params.layers.push_back(std::move(layer));
    fan_in = out;
  };
  for (int width : hidden) add_layer(width, Activation::kRelu);
  add_layer(output_size, output_activation);
  return params;
}

template <typename Scalar>
GradientSet<Scalar> zero_gradients(const MlpParameters<Scalar>& params) {
  GradientSet<Scalar> grads;
  grads.layers.reserve(params.layers.size());
  for (const auto& layer : params.layers) {
    grads.layers.push_back({Matrix<Scalar>::Zero(layer.weight.rows(), layer.weight.cols()),
                            Vector<Scalar>::Zero(layer.bias.size())});
  }
  return grads;
}

template <typename Scalar>
AdamState<Scalar> make_adam_state(const MlpParameters<Scalar>& params) {
  return {zero_gradients(params), zero_gradients(params), 0};
}

// Batched forward pass. When `trace` is non-null it receives every layer's
// activations for a later call to backward().
template <typename Scalar>
Matrix<Scalar> forward(const MlpParameters<Scalar>& params, Matrix<Scalar> inputs,
                       ForwardTrace<Scalar>* trace = nullptr) {
  if (params.layers.empty()) throw ConfigError("forward: network has no layers");
  if (inputs.rows() != params.input_size()) {
    throw ConfigError("forward: input size " + std::to_string(inputs.rows()) + " != network input " +
                      std::to_string(params.input_size()));
  }
  if (trace != nullptr) {
    trace->activations.clear();
    trace->activations.reserve(params.layers.size() + 1);
    trace->activations.push_back(std::move(inputs));
  }
  const Matrix<Scalar>& first = trace != nullptr ? trace->activations.front() : inputs;
  Matrix<Scalar> current;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& layer = params.layers[i];
    Matrix<Scalar> next(layer.weight.rows(), first.cols());
    next.noalias() = layer.weight * (i == 0 ? first : current);
    next.colwise() += layer.bias;
    detail::apply_activation(layer.activation, next);
    if (trace != nullptr) trace->activations.push_back(next);
    current = std::move(next);
  }
  return current;
}

template <typename Scalar>
Vector<Scalar> forward(const MlpParameters<Scalar>& params, const Vector<Scalar>& input) {
  Matrix<Scalar> batch = input;
  return forward(params, batch).col(0);
}

// Backpropagates `upstream` (d loss / d output, one column per sample)
// through the traced pass. Parameter gradients are summed over the batch.
// `input_gradient` stays empty unless `want_input_gradient`.
template <typename Scalar>
BackwardResult<Scalar> backward(const MlpParameters<Scalar>& params,
                                const ForwardTrace<Scalar>& trace,
                                const Matrix<Scalar>& upstream,
                                bool want_parameter_gradients = true,
                                bool want_input_gradient = true) {
  const std::size_t depth = params.layers.size();
  if (trace.activations.size() != depth + 1) throw ConfigError("backward: trace does not match network");
  if (upstream.rows() != params.output_size() || upstream.cols() != trace.activations.back().cols()) {
    throw ConfigError("backward: upstream gradient shape mismatch");
  }
  BackwardResult<Scalar> result;
  if (want_parameter_gradients) result.gradients.layers.resize(depth);
  Matrix<Scalar> delta = upstream;
  for (std::size_t i = depth; i-- > 0;) {
    const auto& layer = params.layers[i];
    detail::scale_by_derivative(layer.activation, trace.activations[i + 1], delta);
    const Matrix<Scalar>& layer_input = trace.activations[i];
    if (want_parameter_gradients) {
      auto& grad = result.gradients.layers[i];
      grad.weight.resize(layer.weight.rows(), layer.weight.cols());
      grad.weight.noalias() = delta * layer_input.transpose();
      grad.bias = delta.rowwise().sum();
    }
    if (i == 0 && !want_input_gradient) return result;
    Matrix<Scalar> previous(layer.weight.cols(), delta.cols());
    previous.noalias() = layer.weight.transpose() * delta;
    delta = std::move(previous);
  }
  result.input_gradient = std::move(delta);
  return result;
}

// Single-sample convenience: returns (d loss / d params, d loss / d input).
template <typename Scalar>
std::pair<GradientSet<Scalar>, Vector<Scalar>> backward(const MlpParameters<Scalar>& params,
                                                        const Vector<Scalar>& input,
                                                        const Vector<Scalar>& upstream) {
  ForwardTrace<Scalar> trace;
  Matrix<Scalar> batch = input;
  forward(params, batch, &trace);
  Matrix<Scalar> up = upstream;
  auto result = backward(params, trace, up);
  return {std::move(result.gradients), result.input_gradient.col(0)};
}

template <typename Scalar>
Scalar global_norm(const GradientSet<Scalar>& grads) {
  Scalar sum = 0;
  for (const auto& layer : grads.layers) sum += layer.weight.squaredNorm() + layer.bias.squaredNorm();
  return std::sqrt(sum);
}

template <typename Scalar>
bool all_finite(const GradientSet<Scalar>& grads) {
  for (const auto& layer : grads.layers) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

// Rescales the whole set so that its global L2 norm is at most `max_norm`.
template <typename Scalar>
GradientSet<Scalar> clip_gradients(GradientSet<Scalar> grads, Scalar max_norm) {
  if (!(max_norm > 0)) throw ConfigError("clip_gradients: max_norm must be positive");
  const Scalar norm = global_norm(grads);
  if (norm > max_norm) {
    const Scalar scale = max_norm / norm;
    for (auto& layer : grads.layers) {
      layer.weight *= scale;
      layer.bias *= scale;
    }
  }
  return grads;
}

template <typename Scalar>
void adam_step(MlpParameters<Scalar>& params, AdamState<Scalar>& state,
               const GradientSet<Scalar>& grads, Scalar learning_rate,
               const AdamHyper& hyper = {}) {
  if (!(learning_rate > 0)) throw ConfigError("adam_step: learning rate must be positive");
  detail::require_same_shape(params, grads, "adam_step");
  detail::require_same_shape(params, state.first_moment, "adam_step");
  if (!all_finite(grads)) throw TrainingError("adam_step: non-finite gradient");

  state.step += 1;
  const Scalar beta1 = static_cast<Scalar>(hyper.beta1);
  const Scalar beta2 = static_cast<Scalar>(hyper.beta2);
  const Scalar eps = static_cast<Scalar>(hyper.epsilon);
  const Scalar correction1 = Scalar(1) - std::pow(beta1, static_cast<Scalar>(state.step));
  const Scalar correction2 = Scalar(1) - std::pow(beta2, static_cast<Scalar>(state.step));

  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = beta1 * m + (Scalar(1) - beta1) * g;
    v = beta2 * v + (Scalar(1) - beta2) * g.cwiseProduct(g);
    param.array() -= learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    update(params.layers[i].weight, state.first_moment.layers[i].weight,
           state.second_moment.layers[i].weight, grads.layers[i].weight);
    update(params.layers[i].bias, state.first_moment.layers[i].bias,
           state.second_moment.layers[i].bias, grads.layers[i].bias);
  }
}

// target <- tau * source + (1 - tau) * target, entrywise.
template <typename Scalar>
void soft_update(MlpParameters<Scalar>& target, const MlpParameters<Scalar>& source, Scalar tau) {
  if (!(tau >= 0 && tau <= 1)) throw ConfigError("soft_update: tau must lie in [0, 1]");
  if (!same_shape(target, source)) throw ConfigError("soft_update: shape mismatch");
  for (std::size_t i = 0; i < target.layers.size(); ++i) {
    auto& t = target.layers[i];
    const auto& s = source.layers[i];
    t.weight = tau * s.weight + (Scalar(1) - tau) * t.weight;
    t.bias = tau * s.bias + (Scalar(1) - tau) * t.bias;
  }
}

// Checkpoint text format, one network per file:
//
//   maddpgk-mlp 1
//   layers <L>
//   layer <i> <activation> <rows> <cols>
//   <rows lines of cols weights, row-major>
//   <one line of rows biases>
//   ... repeated for each layer
//
// Values are written with max_digits10 so a load reproduces the exact bits.
template <typename Scalar>
void save_checkpoint(std::ostream& out, const MlpParameters<Scalar>& params) {
  std::ostringstream buffer;
  buffer.precision(std::numeric_limits<Scalar>::max_digits10);
  buffer << "maddpgk-mlp 1\n";
  buffer << "layers " << params.layers.size() << '\n';
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& layer = params.layers[i];
    buffer << "layer " << i << ' ' << activation_name(layer.activation) << ' ' << layer.weight.rows()
           << ' ' << layer.weight.cols() << '\n';
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        buffer << (c == 0 ? "" : " ") << layer.weight(r, c);
      }
      buffer << '\n';
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) buffer << (r == 0 ? "" : " ") << layer.bias(r);
    buffer << '\n';
  }
  out << buffer.str();
}

template <typename Scalar>
MlpParameters<Scalar> load_checkpoint(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "maddpgk-mlp" || version != 1) {
    throw ConfigError("checkpoint: bad header");
  }
  std::string keyword;
  std::size_t count = 0;
  if (!(in >> keyword >> count) || keyword != "layers") throw ConfigError("checkpoint: missing layer count");
  MlpParameters<Scalar> params;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t index = 0;
    std::string activation;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    if (!(in >> keyword >> index >> activation >> rows >> cols) || keyword != "layer" || index != i ||
        rows <= 0 || cols <= 0) {
      throw ConfigError("checkpoint: bad layer header at layer " + std::to_string(i));
    }
    DenseLayer<Scalar> layer;
    layer.activation = activation_from_name(activation);
    layer.weight.resize(rows, cols);
    layer.bias.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (!(in >> layer.weight(r, c))) throw ConfigError("checkpoint: truncated weights");
      }
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!(in >> layer.bias(r))) throw ConfigError("checkpoint: truncated biases");
    }
    params.layers.push_back(std::move(layer));
  }
  validate(params);
  return params;
}

using Mlp = MlpParameters<double>;
using Gradients = GradientSet<double>;
using Adam = AdamState<double>;
using Trace = ForwardTrace<double>;

}  // namespace maddpgk::nn

#endif  // MADDPGK_NN_HPP_
