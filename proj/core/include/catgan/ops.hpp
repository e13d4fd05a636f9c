#pragma once

#include <cstddef>
#include <span>

#include "catgan/conv_shape.hpp"
#include "catgan/graph.hpp"
#include "catgan/tensor.hpp"

/// Differentiable operations recorded on a Graph.
///
/// Images are NHWC. Convolution filters are [kH, kW, inC, outC]; a transposed
/// convolution takes the filter of the convolution it is the adjoint of, i.e.
/// [kH, kW, outC, inC] when read in its own input/output terms.
namespace catgan::ops {

enum class ActivationKind { none, relu, lrelu, sigmoid, tanh, softmax };

/// Leaky ReLU written as `linear * x + absolute * |x|`. The default is the
/// 0.54/0.4 form used by the categorical GAN (slope 0.14 for x < 0);
/// `slope_02()` gives the usual 0.2-slope variant.
struct LeakyRelu {
  double linear = 0.54;
  double absolute = 0.4;

  static constexpr LeakyRelu slope_02() { return {0.6, 0.4}; }
  friend bool operator==(const LeakyRelu&, const LeakyRelu&) = default;
};

struct Activation {
  ActivationKind kind = ActivationKind::none;
  LeakyRelu leaky{};
};

struct ConvOptions {
  std::size_t stride_h = 1;
  std::size_t stride_w = 1;
  Padding padding = Padding::same;
};

template <typename T>
struct BatchNormStats {
  Tensor<T> mean;
  Tensor<T> var;
};

struct BatchNormOptions {
  Mode mode = Mode::train;
  bool update_running = true;
  double epsilon = 1e-5;
  double momentum = 0.99;
};

// Dense algebra.
template <typename T> Var matmul(Graph<T>& g, Var a, Var b);
template <typename T> Var affine(Graph<T>& g, Var x, Var weight, Var bias);
template <typename T> Var bias_add(Graph<T>& g, Var x, Var bias);
template <typename T> Var add(Graph<T>& g, Var a, Var b);
template <typename T> Var sub(Graph<T>& g, Var a, Var b);
/// Elementwise product of equally shaped tensors.
template <typename T> Var mul(Graph<T>& g, Var a, Var b);
template <typename T> Var scale(Graph<T>& g, Var x, T factor);
template <typename T> Var reshape(Graph<T>& g, Var x, Shape shape);
template <typename T> Var flatten(Graph<T>& g, Var x);
/// Columns [first, first + count) of a [B, K] tensor.
template <typename T> Var columns(Graph<T>& g, Var x, std::size_t first, std::size_t count);

// Activations.
template <typename T> Var activation(Graph<T>& g, Var x, const Activation& act);
template <typename T> Var relu(Graph<T>& g, Var x);
template <typename T> Var leaky_relu(Graph<T>& g, Var x, LeakyRelu leaky = {});
template <typename T> Var sigmoid(Graph<T>& g, Var x);
template <typename T> Var tanh(Graph<T>& g, Var x);
/// Softmax over the last axis.
template <typename T> Var softmax(Graph<T>& g, Var x);
template <typename T> Var log(Graph<T>& g, Var x);
template <typename T> Var clamp(Graph<T>& g, Var x, T lo, T hi);

// Convolution layers.
template <typename T> Var conv2d(Graph<T>& g, Var x, Var filter, const ConvOptions& opt);
template <typename T> Var conv2d_transpose(Graph<T>& g, Var x, Var filter, const ConvOptions& opt);

/// Per-channel (last axis) normalization. Train mode needs a batch of at
/// least two and may update `running`; inference mode reads `running`.
template <typename T>
Var batch_norm(Graph<T>& g, Var x, Var gamma, Var beta, BatchNormStats<T>& running,
               const BatchNormOptions& opt);

/// Inverted dropout: train mode zeroes each element with probability
/// 1 - keep_prob and scales survivors by 1 / keep_prob.
template <typename T> Var dropout(Graph<T>& g, Var x, double keep_prob, Mode mode, Rng& rng);

/// [B, H, W, C] -> [B, C].
template <typename T> Var global_avg_pool(Graph<T>& g, Var x);

// Reductions and losses.
template <typename T> Var sum(Graph<T>& g, Var x);
template <typename T> Var mean(Graph<T>& g, Var x);
template <typename T> Var weighted_sum(Graph<T>& g, std::span<const Var> scalars, std::span<const T> weights);
/// Elementwise max(z,0) - z*t + log(1 + exp(-|z|)); targets get no gradient.
template <typename T> Var sigmoid_cross_entropy(Graph<T>& g, Var logits, Var targets);
/// Row-wise -sum(t * log_softmax(z)) of [B, K] logits, giving [B].
template <typename T> Var softmax_cross_entropy(Graph<T>& g, Var logits, Var targets);
/// Mean squared error between equally sized tensors.
template <typename T> Var mse(Graph<T>& g, Var pred, Var obs);
/// 1 - concordance correlation coefficient with population moments. n >= 2.
template <typename T> Var one_minus_ccc(Graph<T>& g, Var pred, Var obs);
/// Elementwise Huber loss of residuals `a`.
template <typename T> Var huber(Graph<T>& g, Var a, T delta);

}  // namespace catgan::ops
