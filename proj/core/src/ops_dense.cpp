#include <algorithm>
#include <cmath>
#include <vector>

#include "catgan/ops.hpp"
#include "kernels.hpp"

namespace catgan::ops {

namespace {

template <typename T>
void require_same_shape(const Graph<T>& g, Var a, Var b, const char* op) {
  if (g.value(a).shape() != g.value(b).shape()) {
    throw ShapeError(std::string(op) + ": shapes " + to_string(g.value(a).shape()) + " and " +
                     to_string(g.value(b).shape()) + " differ");
  }
}

template <typename T>
void accumulate(Tensor<T>* slot, const Tensor<T>& delta) {
  if (slot == nullptr) return;
  for (std::size_t i = 0; i < delta.size(); ++i) (*slot)[i] += delta[i];
}

// Elementwise op with derivative expressed through input x and output y.
template <typename T, typename Fwd, typename Deriv>
Var unary(Graph<T>& g, Var x, std::string_view name, Fwd fwd, Deriv deriv) {
  const Tensor<T>& in = g.value(x);
  Tensor<T> out(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  return g.record(name, std::move(out), {x}, [x, deriv](Graph<T>& gr, Var self) {
    Tensor<T>* dx = gr.grad_slot(x);
    if (dx == nullptr) return;
    const Tensor<T>& in = gr.value(x);
    const Tensor<T>& y = gr.value(self);
    const Tensor<T>& dy = gr.grad(self);
    for (std::size_t i = 0; i < in.size(); ++i) (*dx)[i] += dy[i] * deriv(in[i], y[i]);
  });
}

}  // namespace

template <typename T>
Var matmul(Graph<T>& g, Var a, Var b) {
  const Tensor<T>& av = g.value(a);
  const Tensor<T>& bv = g.value(b);
  if (av.rank() != 2 || bv.rank() != 2 || av.extent(1) != bv.extent(0)) {
    throw ShapeError("matmul: cannot multiply " + to_string(av.shape()) + " by " +
                     to_string(bv.shape()));
  }
  const std::size_t rows = av.extent(0), inner = av.extent(1), cols = bv.extent(1);
  Tensor<T> out({rows, cols});
  detail::as_matrix(out.data(), rows, cols).noalias() =
      detail::as_matrix(av.data(), rows, inner) * detail::as_matrix(bv.data(), inner, cols);
  return g.record("matmul", std::move(out), {a, b}, [a, b, rows, inner, cols](Graph<T>& gr, Var self) {
    const Tensor<T>& dy = gr.grad(self);
    auto dy_m = detail::as_matrix(dy.data(), rows, cols);
    if (Tensor<T>* da = gr.grad_slot(a)) {
      detail::as_matrix(da->data(), rows, inner).noalias() +=
          dy_m * detail::as_matrix(gr.value(b).data(), inner, cols).transpose();
    }
    if (Tensor<T>* db = gr.grad_slot(b)) {
      detail::as_matrix(db->data(), inner, cols).noalias() +=
          detail::as_matrix(gr.value(a).data(), rows, inner).transpose() * dy_m;
    }
  });
}

template <typename T>
Var bias_add(Graph<T>& g, Var x, Var bias) {
  const Tensor<T>& xv = g.value(x);
  const Tensor<T>& bv = g.value(bias);
  if (bv.rank() != 1 || xv.rank() == 0 || xv.shape().back() != bv.extent(0)) {
    throw ShapeError("bias_add: bias " + to_string(bv.shape()) + " does not match last axis of " +
                     to_string(xv.shape()));
  }
  const std::size_t width = bv.extent(0);
  Tensor<T> out = xv;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i % width];
  return g.record("bias_add", std::move(out), {x, bias}, [x, bias, width](Graph<T>& gr, Var self) {
    const Tensor<T>& dy = gr.grad(self);
    accumulate(gr.grad_slot(x), dy);
    if (Tensor<T>* db = gr.grad_slot(bias)) {
      for (std::size_t i = 0; i < dy.size(); ++i) (*db)[i % width] += dy[i];
    }
  });
}

template <typename T>
Var affine(Graph<T>& g, Var x, Var weight, Var bias) {
  const Tensor<T>& xv = g.value(x);
  const Tensor<T>& wv = g.value(weight);
  if (xv.rank() != 2 || wv.rank() != 2 || xv.extent(1) != wv.extent(0)) {
    throw ShapeError("affine: input " + to_string(xv.shape()) + " does not match weight " +
                     to_string(wv.shape()));
  }
  return bias_add(g, matmul(g, x, weight), bias);
}

template <typename T>
Var add(Graph<T>& g, Var a, Var b) {
  require_same_shape(g, a, b, "add");
  Tensor<T> out = g.value(a);
  const Tensor<T>& bv = g.value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return g.record("add", std::move(out), {a, b}, [a, b](Graph<T>& gr, Var self) {
    const Tensor<T>& dy = gr.grad(self);
    accumulate(gr.grad_slot(a), dy);
    accumulate(gr.grad_slot(b), dy);
  });
}

template <typename T>
Var sub(Graph<T>& g, Var a, Var b) {
  require_same_shape(g, a, b, "sub");
  Tensor<T> out = g.value(a);
  const Tensor<T>& bv = g.value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return g.record("sub", std::move(out), {a, b}, [a, b](Graph<T>& gr, Var self) {
    const Tensor<T>& dy = gr.grad(self);
    accumulate(gr.grad_slot(a), dy);
    if (Tensor<T>* db = gr.grad_slot(b)) {
      for (std::size_t i = 0; i < dy.size(); ++i) (*db)[i] -= dy[i];
    }
  });
}

template <typename T>
Var mul(Graph<T>& g, Var a, Var b) {
  require_same_shape(g, a, b, "mul");
  Tensor<T> out = g.value(a);
  const Tensor<T>& bv = g.value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return g.record("mul", std::move(out), {a, b}, [a, b](Graph<T>& gr, Var self) {
    const Tensor<T>& dy = gr.grad(self);
    if (Tensor<T>* da = gr.grad_slot(a)) {
      const Tensor<T>& bv = gr.value(b);
      for (std::size_t i = 0; i < dy.size(); ++i) (*da)[i] += dy[i] * bv[i];
    }
    if (Tensor<T>* db = gr.grad_slot(b)) {
      const Tensor<T>& av = gr.value(a);
      for (std::size_t i = 0; i < dy.size(); ++i) (*db)[i] += dy[i] * av[i];
    }
  });
}

template <typename T>
Var scale(Graph<T>& g, Var x, T factor) {
  return unary(
      g, x, "scale", [factor](T v) { return v * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Var reshape(Graph<T>& g, Var x, Shape shape) {
  Tensor<T> out = g.value(x).reshaped(std::move(shape));
  return g.record("reshape", std::move(out), {x}, [x](Graph<T>& gr, Var self) {
    accumulate(gr.grad_slot(x), gr.grad(self));
  });
}

template <typename T>
Var flatten(Graph<T>& g, Var x) {
  const Tensor<T>& xv = g.value(x);
  if (xv.rank() < 1) throw ShapeError("flatten: scalar input");
  const std::size_t batch = xv.extent(0);
  return reshape(g, x, Shape{batch, xv.size() / batch});
}

template <typename T>
Var columns(Graph<T>& g, Var x, std::size_t first, std::size_t count) {
  const Tensor<T>& xv = g.value(x);
  if (xv.rank() != 2 || count == 0 || first + count > xv.extent(1)) {
    throw ShapeError("columns: range [" + std::to_string(first) + "," +
                     std::to_string(first + count) + ") outside " + to_string(xv.shape()));
  }
  const std::size_t rows = xv.extent(0), width = xv.extent(1);
  Tensor<T> out({rows, count});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < count; ++c) out[r * count + c] = xv[r * width + first + c];
  }
  return g.record("columns", std::move(out), {x},
                  [x, first, count, rows, width](Graph<T>& gr, Var self) {
                    Tensor<T>* dx = gr.grad_slot(x);
                    if (dx == nullptr) return;
                    const Tensor<T>& dy = gr.grad(self);
                    for (std::size_t r = 0; r < rows; ++r) {
                      for (std::size_t c = 0; c < count; ++c) {
                        (*dx)[r * width + first + c] += dy[r * count + c];
                      }
                    }
                  });
}

template <typename T>
Var relu(Graph<T>& g, Var x) {
  return unary(
      g, x, "relu", [](T v) { return v > T{0} ? v : T{0}; },
      [](T v, T) { return v > T{0} ? T{1} : T{0}; });
}

template <typename T>
Var leaky_relu(Graph<T>& g, Var x, LeakyRelu leaky) {
  const T a = static_cast<T>(leaky.linear);
  const T b = static_cast<T>(leaky.absolute);
  return unary(
      g, x, "lrelu", [a, b](T v) { return a * v + b * std::abs(v); },
      [a, b](T v, T) { return v >= T{0} ? a + b : a - b; });
}

template <typename T>
Var sigmoid(Graph<T>& g, Var x) {
  return unary(
      g, x, "sigmoid",
      [](T v) {
        if (v >= T{0}) return T{1} / (T{1} + std::exp(-v));
        const T e = std::exp(v);
        return e / (T{1} + e);
      },
      [](T, T y) { return y * (T{1} - y); });
}

template <typename T>
Var tanh(Graph<T>& g, Var x) {
  return unary(
      g, x, "tanh", [](T v) { return std::tanh(v); }, [](T, T y) { return T{1} - y * y; });
}

template <typename T>
Var softmax(Graph<T>& g, Var x) {
  const Tensor<T>& xv = g.value(x);
  if (xv.rank() < 1) throw ShapeError("softmax: scalar input");
  const std::size_t width = xv.shape().back();
  const std::size_t rows = xv.size() / width;
  Tensor<T> out(xv.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = xv.data() + r * width;
    T* y = out.data() + r * width;
    const T peak = *std::max_element(in, in + width);
    T total{0};
    for (std::size_t k = 0; k < width; ++k) total += (y[k] = std::exp(in[k] - peak));
    for (std::size_t k = 0; k < width; ++k) y[k] /= total;
  }
  return g.record("softmax", std::move(out), {x}, [x, rows, width](Graph<T>& gr, Var self) {
    Tensor<T>* dx = gr.grad_slot(x);
    if (dx == nullptr) return;
    const Tensor<T>& y = gr.value(self);
    const Tensor<T>& dy = gr.grad(self);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t o = r * width;
      T dot{0};
      for (std::size_t k = 0; k < width; ++k) dot += dy[o + k] * y[o + k];
      for (std::size_t k = 0; k < width; ++k) (*dx)[o + k] += y[o + k] * (dy[o + k] - dot);
    }
  });
}

template <typename T>
Var activation(Graph<T>& g, Var x, const Activation& act) {
  switch (act.kind) {
    case ActivationKind::none: return x;
    case ActivationKind::relu: return relu(g, x);
    case ActivationKind::lrelu: return leaky_relu(g, x, act.leaky);
    case ActivationKind::sigmoid: return sigmoid(g, x);
    case ActivationKind::tanh: return tanh(g, x);
    case ActivationKind::softmax: return softmax(g, x);
  }
  return x;
}

template <typename T>
Var log(Graph<T>& g, Var x) {
  return unary(
      g, x, "log", [](T v) { return std::log(v); }, [](T v, T) { return T{1} / v; });
}

template <typename T>
Var clamp(Graph<T>& g, Var x, T lo, T hi) {
  return unary(
      g, x, "clamp", [lo, hi](T v) { return std::clamp(v, lo, hi); },
      [lo, hi](T v, T) { return (v >= lo && v <= hi) ? T{1} : T{0}; });
}

template <typename T>
Var dropout(Graph<T>& g, Var x, double keep_prob, Mode mode, Rng& rng) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw std::invalid_argument("dropout: keep_prob must lie in (0, 1], got " +
                                std::to_string(keep_prob));
  }
  if (mode == Mode::inference || keep_prob == 1.0) return x;
  const Tensor<T>& xv = g.value(x);
  std::vector<T> mask(xv.size());
  // Each 64-bit draw yields four 16-bit uniforms; keep iff u < keep_prob * 2^16,
  // so keep_prob resolves to 2^-16.
  const auto threshold = static_cast<std::uint32_t>(std::lround(std::ldexp(keep_prob, 16)));
  const T kept = static_cast<T>(1.0 / keep_prob);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < mask.size(); ++i, bits >>= 16) {
    if (i % 4 == 0) bits = rng();
    mask[i] = kept * static_cast<T>((bits & 0xffffu) < threshold);
  }
  Tensor<T> out(xv.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * mask[i];
  return g.record("dropout", std::move(out), {x}, [x, mask = std::move(mask)](Graph<T>& gr, Var self) {
    Tensor<T>* dx = gr.grad_slot(x);
    if (dx == nullptr) return;
    const Tensor<T>& dy = gr.grad(self);
    for (std::size_t i = 0; i < dy.size(); ++i) (*dx)[i] += dy[i] * mask[i];
  });
}

template <typename T>
Var global_avg_pool(Graph<T>& g, Var x) {
  const Tensor<T>& xv = g.value(x);
  if (xv.rank() != 4) throw ShapeError("global_avg_pool: expected NHWC, got " + to_string(xv.shape()));
  const std::size_t batch = xv.extent(0), channels = xv.extent(3);
  const std::size_t area = xv.extent(1) * xv.extent(2);
  Tensor<T> out({batch, channels});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t p = 0; p < area; ++p) {
      const T* px = xv.data() + (b * area + p) * channels;
      for (std::size_t c = 0; c < channels; ++c) out[b * channels + c] += px[c];
    }
  }
  const T inv = T{1} / static_cast<T>(area);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv;
  return g.record("global_avg_pool", std::move(out), {x},
                  [x, batch, channels, area, inv](Graph<T>& gr, Var self) {
                    Tensor<T>* dx = gr.grad_slot(x);
                    if (dx == nullptr) return;
                    const Tensor<T>& dy = gr.grad(self);
                    for (std::size_t b = 0; b < batch; ++b) {
                      for (std::size_t p = 0; p < area; ++p) {
                        T* px = dx->data() + (b * area + p) * channels;
                        for (std::size_t c = 0; c < channels; ++c) px[c] += dy[b * channels + c] * inv;
                      }
                    }
                  });
}

template <typename T>
Var batch_norm(Graph<T>& g, Var x, Var gamma, Var beta, BatchNormStats<T>& running,
               const BatchNormOptions& opt) {
  const Tensor<T>& xv = g.value(x);
  if (xv.rank() < 2) throw ShapeError("batch_norm: need [B, ..., C], got " + to_string(xv.shape()));
  const std::size_t channels = xv.shape().back();
  const std::size_t rows = xv.size() / channels;
  const Tensor<T>& gv = g.value(gamma);
  const Tensor<T>& bv = g.value(beta);
  if (gv.size() != channels || bv.size() != channels || running.mean.size() != channels ||
      running.var.size() != channels) {
    throw ShapeError("batch_norm: per-channel tensors do not match " + std::to_string(channels) +
                     " channels");
  }
  const T eps = static_cast<T>(opt.epsilon);

  if (opt.mode == Mode::inference) {
    std::vector<T> inv_std(channels);
    for (std::size_t c = 0; c < channels; ++c) inv_std[c] = T{1} / std::sqrt(running.var[c] + eps);
    Tensor<T> out(xv.shape());
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t i = r * channels + c;
        out[i] = gv[c] * (xv[i] - running.mean[c]) * inv_std[c] + bv[c];
      }
    }
    std::vector<T> mean(running.mean.values().begin(), running.mean.values().end());
    return g.record("batch_norm", std::move(out), {x, gamma, beta},
                    [x, gamma, beta, rows, channels, inv_std = std::move(inv_std),
                     mean = std::move(mean)](Graph<T>& gr, Var self) {
                      const Tensor<T>& dy = gr.grad(self);
                      const Tensor<T>& xv = gr.value(x);
                      const Tensor<T>& gv = gr.value(gamma);
                      Tensor<T>* dx = gr.grad_slot(x);
                      Tensor<T>* dg = gr.grad_slot(gamma);
                      Tensor<T>* db = gr.grad_slot(beta);
                      for (std::size_t r = 0; r < rows; ++r) {
                        for (std::size_t c = 0; c < channels; ++c) {
                          const std::size_t i = r * channels + c;
                          if (dx) (*dx)[i] += dy[i] * gv[c] * inv_std[c];
                          if (dg) (*dg)[c] += dy[i] * (xv[i] - mean[c]) * inv_std[c];
                          if (db) (*db)[c] += dy[i];
                        }
                      }
                    });
  }

  if (xv.extent(0) < 2) {
    throw ShapeError("batch_norm: training mode needs a batch of at least 2, got " +
                     std::to_string(xv.extent(0)));
  }
  std::vector<T> mean(channels, T{0}), var(channels, T{0});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < channels; ++c) mean[c] += xv[r * channels + c];
  }
  for (auto& m : mean) m /= static_cast<T>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < channels; ++c) {
      const T d = xv[r * channels + c] - mean[c];
      var[c] += d * d;
    }
  }
  for (auto& v : var) v /= static_cast<T>(rows);

  std::vector<T> inv_std(channels);
  for (std::size_t c = 0; c < channels; ++c) inv_std[c] = T{1} / std::sqrt(var[c] + eps);
  Tensor<T> xhat(xv.shape()), out(xv.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t i = r * channels + c;
      xhat[i] = (xv[i] - mean[c]) * inv_std[c];
      out[i] = gv[c] * xhat[i] + bv[c];
    }
  }

  if (opt.update_running) {
    const T m = static_cast<T>(opt.momentum);
    const T unbias = rows > 1 ? static_cast<T>(rows) / static_cast<T>(rows - 1) : T{1};
    for (std::size_t c = 0; c < channels; ++c) {
      running.mean[c] = m * running.mean[c] + (T{1} - m) * mean[c];
      running.var[c] = m * running.var[c] + (T{1} - m) * var[c] * unbias;
    }
  }

  return g.record("batch_norm", std::move(out), {x, gamma, beta},
                  [x, gamma, beta, rows, channels, inv_std = std::move(inv_std),
                   xhat = std::move(xhat)](Graph<T>& gr, Var self) {
                    const Tensor<T>& dy = gr.grad(self);
                    const Tensor<T>& gv = gr.value(gamma);
                    std::vector<T> sum_dy(channels, T{0}), sum_dy_xhat(channels, T{0});
                    for (std::size_t r = 0; r < rows; ++r) {
                      for (std::size_t c = 0; c < channels; ++c) {
                        const std::size_t i = r * channels + c;
                        sum_dy[c] += dy[i];
                        sum_dy_xhat[c] += dy[i] * xhat[i];
                      }
                    }
                    if (Tensor<T>* dg = gr.grad_slot(gamma)) {
                      for (std::size_t c = 0; c < channels; ++c) (*dg)[c] += sum_dy_xhat[c];
                    }
                    if (Tensor<T>* db = gr.grad_slot(beta)) {
                      for (std::size_t c = 0; c < channels; ++c) (*db)[c] += sum_dy[c];
                    }
                    if (Tensor<T>* dx = gr.grad_slot(x)) {
                      const T n = static_cast<T>(rows);
                      for (std::size_t r = 0; r < rows; ++r) {
                        for (std::size_t c = 0; c < channels; ++c) {
                          const std::size_t i = r * channels + c;
                          (*dx)[i] += gv[c] * inv_std[c] *
                                      (dy[i] - sum_dy[c] / n - xhat[i] * sum_dy_xhat[c] / n);
                        }
                      }
                    }
                  });
}

template <typename T>
Var sum(Graph<T>& g, Var x) {
  const Tensor<T>& xv = g.value(x);
  T total{0};
  for (T v : xv.values()) total += v;
  return g.record("sum", Tensor<T>::scalar(total), {x}, [x](Graph<T>& gr, Var self) {
    Tensor<T>* dx = gr.grad_slot(x);
    if (dx == nullptr) return;
    const T dy = gr.grad(self).item();
    for (auto& v : dx->values()) v += dy;
  });
}

template <typename T>
Var mean(Graph<T>& g, Var x) {
  const Tensor<T>& xv = g.value(x);
  T total{0};
  for (T v : xv.values()) total += v;
  const T inv = T{1} / static_cast<T>(xv.size());
  return g.record("mean", Tensor<T>::scalar(total * inv), {x}, [x, inv](Graph<T>& gr, Var self) {
    Tensor<T>* dx = gr.grad_slot(x);
    if (dx == nullptr) return;
    const T dy = gr.grad(self).item() * inv;
    for (auto& v : dx->values()) v += dy;
  });
}

template <typename T>
Var weighted_sum(Graph<T>& g, std::span<const Var> scalars, std::span<const T> weights) {
  if (scalars.size() != weights.size() || scalars.empty()) {
    throw ShapeError("weighted_sum: need one weight per term");
  }
  // Folded pairwise so the graph keeps a fixed fan-in per node.
  Var acc = scale(g, scalars[0], weights[0]);
  for (std::size_t i = 1; i < scalars.size(); ++i) {
    if (g.value(scalars[i]).size() != 1) throw ShapeError("weighted_sum: terms must be scalars");
    acc = add(g, acc, scale(g, scalars[i], weights[i]));
  }
  return acc;
}

template <typename T>
Var huber(Graph<T>& g, Var a, T delta) {
  if (!(delta > T{0})) throw std::invalid_argument("huber: delta must be positive");
  return unary(
      g, a, "huber",
      [delta](T v) {
        const T m = std::abs(v);
        return m <= delta ? T{0.5} * v * v : delta * (m - T{0.5} * delta);
      },
      [delta](T v, T) {
        if (std::abs(v) <= delta) return v;
        return v > T{0} ? delta : -delta;
      });
}

#define CATGAN_INSTANTIATE_DENSE(T)                                                          \
  template Var matmul<T>(Graph<T>&, Var, Var);                                               \
  template Var affine<T>(Graph<T>&, Var, Var, Var);                                          \
  template Var bias_add<T>(Graph<T>&, Var, Var);                                             \
  template Var add<T>(Graph<T>&, Var, Var);                                                  \
  template Var sub<T>(Graph<T>&, Var, Var);                                                  \
  template Var mul<T>(Graph<T>&, Var, Var);                                                  \
  template Var scale<T>(Graph<T>&, Var, T);                                                  \
  template Var reshape<T>(Graph<T>&, Var, Shape);                                            \
  template Var flatten<T>(Graph<T>&, Var);                                                   \
  template Var columns<T>(Graph<T>&, Var, std::size_t, std::size_t);                         \
  template Var activation<T>(Graph<T>&, Var, const Activation&);                             \
  template Var relu<T>(Graph<T>&, Var);                                                      \
  template Var leaky_relu<T>(Graph<T>&, Var, LeakyRelu);                                     \
  template Var sigmoid<T>(Graph<T>&, Var);                                                   \
  template Var tanh<T>(Graph<T>&, Var);                                                      \
  template Var softmax<T>(Graph<T>&, Var);                                                   \
  template Var log<T>(Graph<T>&, Var);                                                       \
  template Var clamp<T>(Graph<T>&, Var, T, T);                                               \
  template Var dropout<T>(Graph<T>&, Var, double, Mode, Rng&);                               \
  template Var global_avg_pool<T>(Graph<T>&, Var);                                           \
  template Var batch_norm<T>(Graph<T>&, Var, Var, Var, BatchNormStats<T>&,                   \
                             const BatchNormOptions&);                                       \
  template Var sum<T>(Graph<T>&, Var);                                                       \
  template Var mean<T>(Graph<T>&, Var);                                                      \
  template Var weighted_sum<T>(Graph<T>&, std::span<const Var>, std::span<const T>);         \
  template Var huber<T>(Graph<T>&, Var, T);

CATGAN_INSTANTIATE_DENSE(float)
CATGAN_INSTANTIATE_DENSE(double)

}  // namespace catgan::ops
