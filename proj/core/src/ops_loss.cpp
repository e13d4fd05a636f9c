#include <algorithm>
#include <cmath>

#include "catgan/ops.hpp"

namespace catgan::ops {

namespace {

template <typename T>
void require_same_size(const Graph<T>& g, Var a, Var b, const char* op) {
  if (g.value(a).shape() != g.value(b).shape()) {
    throw ShapeError(std::string(op) + ": shapes " + to_string(g.value(a).shape()) + " and " +
                     to_string(g.value(b).shape()) + " differ");
  }
}

template <typename T>
T stable_sigmoid(T z) {
  if (z >= T{0}) return T{1} / (T{1} + std::exp(-z));
  const T e = std::exp(z);
  return e / (T{1} + e);
}

}  // namespace

template <typename T>
Var sigmoid_cross_entropy(Graph<T>& g, Var logits, Var targets) {
  require_same_size(g, logits, targets, "sigmoid_cross_entropy");
  const Tensor<T>& z = g.value(logits);
  const Tensor<T>& t = g.value(targets);
  Tensor<T> out(z.shape());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::max(z[i], T{0}) - z[i] * t[i] + std::log1p(std::exp(-std::abs(z[i])));
  }
  return g.record("sigmoid_cross_entropy", std::move(out), {logits, targets},
                  [logits, targets](Graph<T>& gr, Var self) {
                    Tensor<T>* dz = gr.grad_slot(logits);
                    if (dz == nullptr) return;
                    const Tensor<T>& z = gr.value(logits);
                    const Tensor<T>& t = gr.value(targets);
                    const Tensor<T>& dy = gr.grad(self);
                    for (std::size_t i = 0; i < z.size(); ++i) {
                      (*dz)[i] += dy[i] * (stable_sigmoid(z[i]) - t[i]);
                    }
                  });
}

template <typename T>
Var softmax_cross_entropy(Graph<T>& g, Var logits, Var targets) {
  require_same_size(g, logits, targets, "softmax_cross_entropy");
  const Tensor<T>& z = g.value(logits);
  const Tensor<T>& t = g.value(targets);
  if (z.rank() != 2) throw ShapeError("softmax_cross_entropy: need [B, K], got " + to_string(z.shape()));
  const std::size_t rows = z.extent(0), width = z.extent(1);
  Tensor<T> out({rows});
  for (std::size_t r = 0; r < rows; ++r) {
    const T* zr = z.data() + r * width;
    const T* tr = t.data() + r * width;
    const T peak = *std::max_element(zr, zr + width);
    T total{0};
    for (std::size_t k = 0; k < width; ++k) total += std::exp(zr[k] - peak);
    const T lse = peak + std::log(total);
    T loss{0};
    for (std::size_t k = 0; k < width; ++k) loss += tr[k] * (lse - zr[k]);
    out[r] = loss;
  }
  return g.record("softmax_cross_entropy", std::move(out), {logits, targets},
                  [logits, targets, rows, width](Graph<T>& gr, Var self) {
                    Tensor<T>* dz = gr.grad_slot(logits);
                    if (dz == nullptr) return;
                    const Tensor<T>& z = gr.value(logits);
                    const Tensor<T>& t = gr.value(targets);
                    const Tensor<T>& dy = gr.grad(self);
                    std::vector<T> p(width);
                    for (std::size_t r = 0; r < rows; ++r) {
                      const T* zr = z.data() + r * width;
                      const T* tr = t.data() + r * width;
                      const T peak = *std::max_element(zr, zr + width);
                      T total{0}, mass{0};
                      for (std::size_t k = 0; k < width; ++k) total += (p[k] = std::exp(zr[k] - peak));
                      for (std::size_t k = 0; k < width; ++k) mass += tr[k];
                      for (std::size_t k = 0; k < width; ++k) {
                        (*dz)[r * width + k] += dy[r] * (p[k] / total * mass - tr[k]);
                      }
                    }
                  });
}

template <typename T>
Var mse(Graph<T>& g, Var pred, Var obs) {
  require_same_size(g, pred, obs, "mse");
  const Tensor<T>& p = g.value(pred);
  const Tensor<T>& o = g.value(obs);
  T total{0};
  for (std::size_t i = 0; i < p.size(); ++i) total += (p[i] - o[i]) * (p[i] - o[i]);
  const T n = static_cast<T>(p.size());
  return g.record("mse", Tensor<T>::scalar(total / n), {pred, obs}, [pred, obs, n](Graph<T>& gr, Var self) {
    const Tensor<T>& p = gr.value(pred);
    const Tensor<T>& o = gr.value(obs);
    const T dy = gr.grad(self).item();
    Tensor<T>* dp = gr.grad_slot(pred);
    Tensor<T>* dobs = gr.grad_slot(obs);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const T d = T{2} * (p[i] - o[i]) / n * dy;
      if (dp) (*dp)[i] += d;
      if (dobs) (*dobs)[i] -= d;
    }
  });
}

template <typename T>
Var one_minus_ccc(Graph<T>& g, Var pred, Var obs) {
  require_same_size(g, pred, obs, "one_minus_ccc");
  const Tensor<T>& x = g.value(pred);
  const Tensor<T>& y = g.value(obs);
  const std::size_t count = x.size();
  if (count < 2) throw std::invalid_argument("one_minus_ccc: CCC needs at least 2 samples");
  const T n = static_cast<T>(count);

  T mx{0}, my{0};
  for (std::size_t i = 0; i < count; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  T sxy{0}, sxx{0}, syy{0};
  for (std::size_t i = 0; i < count; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  sxy /= n;
  sxx /= n;
  syy /= n;
  const T denom = sxx + syy + (mx - my) * (mx - my);
  // Two identical constants agree perfectly.
  const T ccc = denom > T{0} ? T{2} * sxy / denom : T{1};

  return g.record("one_minus_ccc", Tensor<T>::scalar(T{1} - ccc), {pred, obs},
                  [pred, obs, count, n, mx, my, sxy, denom](Graph<T>& gr, Var self) {
                    if (!(denom > T{0})) return;
                    const Tensor<T>& x = gr.value(pred);
                    const Tensor<T>& y = gr.value(obs);
                    const T dy = gr.grad(self).item();
                    const T num = T{2} * sxy;
                    const T d2 = denom * denom;
                    const T shift = T{2} * (mx - my) / n;
                    Tensor<T>* dpred = gr.grad_slot(pred);
                    Tensor<T>* dobs = gr.grad_slot(obs);
                    for (std::size_t i = 0; i < count; ++i) {
                      const T cx = x[i] - mx, cy = y[i] - my;
                      if (dpred) {
                        const T drho = (T{2} / n * cy * denom - num * (T{2} / n * cx + shift)) / d2;
                        (*dpred)[i] -= dy * drho;
                      }
                      if (dobs) {
                        const T drho = (T{2} / n * cx * denom - num * (T{2} / n * cy - shift)) / d2;
                        (*dobs)[i] -= dy * drho;
                      }
                    }
                  });
}

#define CATGAN_INSTANTIATE_LOSS(T)                                      \
  template Var sigmoid_cross_entropy<T>(Graph<T>&, Var, Var);           \
  template Var softmax_cross_entropy<T>(Graph<T>&, Var, Var);           \
  template Var mse<T>(Graph<T>&, Var, Var);                             \
  template Var one_minus_ccc<T>(Graph<T>&, Var, Var);

CATGAN_INSTANTIATE_LOSS(float)
CATGAN_INSTANTIATE_LOSS(double)

}  // namespace catgan::ops
