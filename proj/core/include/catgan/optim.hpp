#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "catgan/graph.hpp"
#include "catgan/tensor.hpp"

namespace catgan::optim {

enum class OptimizerKind { sgd, momentum, adagrad, adadelta, rmsprop, adam };

std::string to_string(OptimizerKind kind);

struct Hyper {
  double eta = 0.01;      // learning rate
  double gamma = 0.9;     // momentum / decay of E[g^2]
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool bias_correction = true;  // Adam only
};

/// Defaults per optimizer kind:
///   sgd        eta 0.01
///   momentum   eta 0.01, gamma 0.9
///   adagrad    eta 0.1, epsilon 1e-8
///   adadelta   eta 0.001, gamma 0.9, epsilon 1e-8
///   rmsprop    eta 0.001, gamma 0.9, epsilon 1e-8
///   adam       eta 0.001, beta1 0.9, beta2 0.999, epsilon 1e-8
Hyper default_hyper(OptimizerKind kind);

/// Adam with beta1 = 0.5 as used for both GAN networks.
Hyper gan_adam(double learning_rate);

/// Per-parameter accumulators. `first` holds v (momentum), G (adagrad),
/// E[g^2] (adadelta/rmsprop) or m (adam); `second` holds Adam's v.
template <typename T>
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::sgd;
  Hyper hyper{};
  std::vector<Tensor<T>> first;
  std::vector<Tensor<T>> second;
  std::uint64_t step_count = 0;
};

template <typename T>
OptimizerState<T> make_state(OptimizerKind kind, Hyper hyper);

template <typename T>
OptimizerState<T> make_state(OptimizerKind kind) {
  return make_state<T>(kind, default_hyper(kind));
}

/// One Adam update of every parameter from its `grad`:
///   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
///   theta <- theta - eta * m_hat / (sqrt(v_hat) + eps)
/// with m_hat = m / (1 - b1^t), v_hat = v / (1 - b2^t) when bias correction is on.
template <typename T>
void adam_step(OptimizerState<T>& state, std::span<Parameter<T>> params);

/// sgd:      theta <- theta - eta g
/// momentum: v <- gamma v + eta g;  theta <- theta - v
/// adagrad:  G <- G + g^2;  theta <- theta - eta g / sqrt(G + eps)
/// adadelta / rmsprop (as written, with an explicit eta):
///           E <- gamma E + (1-gamma) g^2;  theta <- theta - eta g / sqrt(E + eps)
template <typename T>
void classic_step(OptimizerState<T>& state, std::span<Parameter<T>> params);

/// Dispatches on state.kind.
template <typename T>
void step(OptimizerState<T>& state, std::span<Parameter<T>> params);

}  // namespace catgan::optim
