#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>

#include "catgan/graph.hpp"
#include "catgan/tensor.hpp"

namespace catgan {

/// Standard deviation of Xavier initialization as used here: 1 / sqrt(in_dim / 2).
inline double xavier_stddev(std::size_t in_dim) {
  if (in_dim == 0) throw std::invalid_argument("xavier_stddev: in_dim must be at least 1");
  return 1.0 / std::sqrt(static_cast<double>(in_dim) / 2.0);
}

/// Normal(0, xavier_stddev(in_dim)) samples of the given shape.
template <typename T>
Tensor<T> xavier_init(Shape shape, std::size_t in_dim, Rng& rng) {
  std::normal_distribution<double> dist(0.0, xavier_stddev(in_dim));
  Tensor<T> out(std::move(shape));
  for (auto& v : out.values()) v = static_cast<T>(dist(rng));
  return out;
}

/// Global L2 norm over every gradient in the set.
template <typename T>
double global_grad_norm(std::span<const Parameter<T>> params) {
  double total = 0.0;
  for (const auto& p : params) {
    for (T g : p.grad.values()) total += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(total);
}

/// Rescales all gradients by max_norm / norm when their global norm exceeds
/// max_norm. Returns the norm before clipping.
template <typename T>
double clip_gradients(std::span<Parameter<T>> params, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("clip_gradients: max_norm must be positive");
  const double norm = global_grad_norm<T>(params);
  if (norm > max_norm) {
    const T factor = static_cast<T>(max_norm / norm);
    for (auto& p : params) {
      for (auto& g : p.grad.values()) g *= factor;
    }
  }
  return norm;
}

}  // namespace catgan
