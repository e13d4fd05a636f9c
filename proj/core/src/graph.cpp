#include "catgan/graph.hpp"

#include <algorithm>

namespace catgan {

template <typename T>
Var Graph<T>::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
Var Graph<T>::constant(Tensor<T> value) {
  Node node;
  node.op = "constant";
  node.value = std::move(value);
  return push(std::move(node));
}

template <typename T>
Var Graph<T>::parameter(Parameter<T>& p) {
  Node node;
  node.op = "parameter";
  node.value = p.value;
  node.param = &p;
  node.requires_grad = true;
  return push(std::move(node));
}

template <typename T>
Var Graph<T>::record(std::string_view op, Tensor<T> value, std::initializer_list<Var> inputs,
                     BackwardFn fn) {
  if (!value.all_finite()) {
    throw NumericError("non-finite value produced by '" + std::string(op) + "' (node " +
                       std::to_string(nodes_.size()) + ")");
  }
  Node node;
  node.op = op;
  node.value = std::move(value);
  node.inputs.assign(inputs.begin(), inputs.end());
  node.requires_grad = std::any_of(node.inputs.begin(), node.inputs.end(),
                                   [this](Var v) { return nodes_.at(v.index).requires_grad; });
  if (node.requires_grad) node.backward = std::move(fn);
  return push(std::move(node));
}

template <typename T>
const Tensor<T>& Graph<T>::grad(Var v) {
  Node& node = nodes_.at(v.index);
  if (node.grad.empty()) node.grad = Tensor<T>(node.value.shape());
  return node.grad;
}

template <typename T>
Tensor<T>* Graph<T>::grad_slot(Var v) {
  Node& node = nodes_.at(v.index);
  if (!node.requires_grad) return nullptr;
  if (node.grad.empty()) node.grad = Tensor<T>(node.value.shape());
  return &node.grad;
}

template <typename T>
void Graph<T>::backward(Var loss) {
  Node& root = nodes_.at(loss.index);
  if (root.value.size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " + to_string(root.value.shape()));
  }
  for (auto& node : nodes_) node.grad = Tensor<T>();
  if (!root.requires_grad) return;
  root.grad = Tensor<T>(root.value.shape(), T{1});

  for (std::size_t i = loss.index + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (node.grad.empty()) continue;
    if (node.backward) {
      node.backward(*this, Var{static_cast<std::uint32_t>(i)});
    } else if (node.param != nullptr) {
      Tensor<T>& acc = node.param->grad;
      if (acc.shape() != node.value.shape()) acc = Tensor<T>(node.value.shape());
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += node.grad[k];
    }
  }
}

template class Graph<float>;
template class Graph<double>;

}  // namespace catgan
