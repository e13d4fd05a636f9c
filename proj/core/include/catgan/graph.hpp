#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catgan/tensor.hpp"

namespace catgan {

using Rng = std::mt19937_64;

/// Train mode uses batch statistics and stochastic layers; inference is deterministic.
enum class Mode { train, inference };

/// Handle to a node recorded on a Graph.
struct Var {
  std::uint32_t index = 0;
  friend bool operator==(Var, Var) = default;
};

/// A named trainable tensor with its accumulated gradient.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

template <typename T>
void zero_grad(std::span<Parameter<T>> params) {
  for (auto& p : params) p.grad = Tensor<T>(p.value.shape());
}

/// Append-only trace of a forward computation, replayed in reverse by backward().
///
/// Nodes are stored in creation order, so every node's inputs precede it.
/// Gradients are only tracked for nodes that (transitively) depend on a
/// trainable parameter; everything else is a constant.
template <typename T>
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, Var)>;

  Var constant(Tensor<T> value);

  /// Leaf bound to `p`; backward() accumulates into p.grad.
  Var parameter(Parameter<T>& p);

  /// Leaf holding a copy of `p` that receives no gradient.
  Var frozen(const Parameter<T>& p) { return constant(p.value); }

  /// Records an operation. `fn` is dropped when no input requires a gradient.
  /// Throws NumericError if `value` holds NaN or Inf.
  Var record(std::string_view op, Tensor<T> value, std::initializer_list<Var> inputs,
             BackwardFn fn);

  const Tensor<T>& value(Var v) const { return nodes_.at(v.index).value; }
  std::span<const Var> inputs(Var v) const { return nodes_.at(v.index).inputs; }
  bool requires_grad(Var v) const { return nodes_.at(v.index).requires_grad; }

  /// Gradient of the last backward() loss w.r.t. `v`; zeros if never reached.
  const Tensor<T>& grad(Var v);

  /// Mutable gradient accumulator for `v`, or nullptr when `v` needs none.
  Tensor<T>* grad_slot(Var v);

  /// Reverse-mode sweep from a scalar loss. Parameter gradients are added to
  /// their Parameter::grad (allocated on first use).
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::string_view op(Var v) const { return nodes_.at(v.index).op; }

 private:
  struct Node {
    std::string_view op;
    Tensor<T> value;
    Tensor<T> grad;
    std::vector<Var> inputs;
    BackwardFn backward;
    Parameter<T>* param = nullptr;
    bool requires_grad = false;
  };

  Var push(Node node);

  std::vector<Node> nodes_;
};

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace catgan
