#include "catgan/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace catgan::optim {

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::momentum: return "momentum";
    case OptimizerKind::adagrad: return "adagrad";
    case OptimizerKind::adadelta: return "adadelta";
    case OptimizerKind::rmsprop: return "rmsprop";
    case OptimizerKind::adam: return "adam";
  }
  return "unknown";
}

Hyper default_hyper(OptimizerKind kind) {
  Hyper h;
  switch (kind) {
    case OptimizerKind::sgd:
    case OptimizerKind::momentum:
      h.eta = 0.01;
      break;
    case OptimizerKind::adagrad:
      h.eta = 0.1;
      break;
    case OptimizerKind::adadelta:
    case OptimizerKind::rmsprop:
    case OptimizerKind::adam:
      h.eta = 0.001;
      break;
  }
  return h;
}

Hyper gan_adam(double learning_rate) {
  Hyper h = default_hyper(OptimizerKind::adam);
  h.eta = learning_rate;
  h.beta1 = 0.5;
  return h;
}

template <typename T>
OptimizerState<T> make_state(OptimizerKind kind, Hyper hyper) {
  OptimizerState<T> state;
  state.kind = kind;
  state.hyper = hyper;
  return state;
}

namespace {

// Allocates zero accumulators on first use and checks shapes afterwards.
template <typename T>
void prepare(OptimizerState<T>& state, std::span<Parameter<T>> params, bool two_slots) {
  if (state.first.empty()) {
    for (const auto& p : params) {
      state.first.emplace_back(p.value.shape());
      if (two_slots) state.second.emplace_back(p.value.shape());
    }
  }
  if (state.first.size() != params.size()) {
    throw ShapeError("optimizer state tracks " + std::to_string(state.first.size()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (p.grad.shape() != p.value.shape() || state.first[i].shape() != p.value.shape()) {
      throw ShapeError("optimizer: parameter '" + p.name + "' " + catgan::to_string(p.value.shape()) +
                       " has gradient " + catgan::to_string(p.grad.shape()) + " and accumulator " +
                       catgan::to_string(state.first[i].shape()));
    }
  }
}

}  // namespace

template <typename T>
void adam_step(OptimizerState<T>& state, std::span<Parameter<T>> params) {
  if (state.kind != OptimizerKind::adam) throw std::invalid_argument("adam_step on a non-Adam state");
  prepare(state, params, true);
  ++state.step_count;
  const Hyper& h = state.hyper;
  const double t = static_cast<double>(state.step_count);
  const double c1 = h.bias_correction ? 1.0 - std::pow(h.beta1, t) : 1.0;
  const double c2 = h.bias_correction ? 1.0 - std::pow(h.beta2, t) : 1.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i].value;
    const auto& grad = params[i].grad;
    auto& m = state.first[i];
    auto& v = state.second[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = grad[k];
      const double mk = h.beta1 * m[k] + (1.0 - h.beta1) * g;
      const double vk = h.beta2 * v[k] + (1.0 - h.beta2) * g * g;
      m[k] = static_cast<T>(mk);
      v[k] = static_cast<T>(vk);
      value[k] -= static_cast<T>(h.eta * (mk / c1) / (std::sqrt(vk / c2) + h.epsilon));
    }
  }
}

template <typename T>
void classic_step(OptimizerState<T>& state, std::span<Parameter<T>> params) {
  if (state.kind == OptimizerKind::adam) throw std::invalid_argument("classic_step on an Adam state");
  const Hyper& h = state.hyper;
  if (state.kind == OptimizerKind::sgd) {
    prepare(state, params, false);
    ++state.step_count;
    for (auto& p : params) {
      for (std::size_t k = 0; k < p.value.size(); ++k) p.value[k] -= static_cast<T>(h.eta * p.grad[k]);
    }
    return;
  }
  prepare(state, params, false);
  ++state.step_count;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i].value;
    const auto& grad = params[i].grad;
    auto& acc = state.first[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = grad[k];
      double a = acc[k];
      double delta = 0.0;
      switch (state.kind) {
        case OptimizerKind::momentum:
          a = h.gamma * a + h.eta * g;
          delta = a;
          break;
        case OptimizerKind::adagrad:
          a += g * g;
          delta = h.eta * g / std::sqrt(a + h.epsilon);
          break;
        case OptimizerKind::adadelta:
        case OptimizerKind::rmsprop:
          a = h.gamma * a + (1.0 - h.gamma) * g * g;
          delta = h.eta * g / std::sqrt(a + h.epsilon);
          break;
        default:
          break;
      }
      acc[k] = static_cast<T>(a);
      value[k] -= static_cast<T>(delta);
    }
  }
}

template <typename T>
void step(OptimizerState<T>& state, std::span<Parameter<T>> params) {
  if (state.kind == OptimizerKind::adam) {
    adam_step(state, params);
  } else {
    classic_step(state, params);
  }
}

#define CATGAN_INSTANTIATE_OPTIM(T)                                                     \
  template OptimizerState<T> make_state<T>(OptimizerKind, Hyper);                       \
  template void adam_step<T>(OptimizerState<T>&, std::span<Parameter<T>>);              \
  template void classic_step<T>(OptimizerState<T>&, std::span<Parameter<T>>);           \
  template void step<T>(OptimizerState<T>&, std::span<Parameter<T>>);

CATGAN_INSTANTIATE_OPTIM(float)
CATGAN_INSTANTIATE_OPTIM(double)

}  // namespace catgan::optim
