#pragma once

// Finite-difference cases for every differentiable op, shared by unit and acceptance tests.

#include <random>
#include <string>
#include <vector>

#include "catgan/ops.hpp"
#include "gradcheck.hpp"

namespace catgan::testing {

struct OpCase {
  std::string name;
  LossBuilder build;
  std::vector<Parameter<double>> params;
};

// Reduces any tensor-valued node to sum(y * P) with a fixed random P.
inline Var project(Graph<double>& g, Var y, std::uint64_t seed = 99) {
  return ops::sum(g, ops::mul(g, y, g.constant(projection(g.value(y).shape(), seed))));
}

inline std::vector<OpCase> op_cases() {
  using P = std::span<Parameter<double>>;
  std::vector<OpCase> cases;
  std::mt19937_64 rng(31);

  cases.push_back({"affine", [](Graph<double>& g, P p) {
    return project(g, ops::affine(g, g.parameter(p[0]), g.parameter(p[1]), g.parameter(p[2])));
  }, {random_parameter("x", {3, 4}, rng), random_parameter("w", {4, 5}, rng), random_parameter("b", {5}, rng)}});
  cases.push_back({"add sub mul scale", [](Graph<double>& g, P p) {
    const Var a = g.parameter(p[0]), b = g.parameter(p[1]);
    return project(g, ops::scale(g, ops::mul(g, ops::add(g, a, b), ops::sub(g, a, b)), 1.7));
  }, {random_parameter("a", {3, 4}, rng), random_parameter("b", {3, 4}, rng)}});
  cases.push_back({"columns reshape flatten", [](Graph<double>& g, P p) {
    const Var c = ops::columns(g, g.parameter(p[0]), 1, 2);
    return project(g, ops::flatten(g, ops::reshape(g, c, Shape{3, 2, 1})));
  }, {random_parameter("x", {3, 4}, rng)}});
  using K = ops::ActivationKind;
  for (auto [kind, name] : {std::pair{K::relu, "relu"}, {K::lrelu, "lrelu"}, {K::sigmoid, "sigmoid"},
                            {K::tanh, "tanh"}, {K::softmax, "softmax"}, {K::none, "identity"}}) {
    cases.push_back({std::string("activation ") + name, [kind](Graph<double>& g, P p) {
      return project(g, ops::activation(g, g.parameter(p[0]), ops::Activation{kind, {}}));
    }, {random_parameter("x", {3, 4}, rng)}});
  }
  cases.push_back({"log clamp", [](Graph<double>& g, P p) {
    return project(g, ops::log(g, ops::clamp(g, g.parameter(p[0]), 0.2, 0.9)));
  }, {random_parameter("x", {3, 4}, rng, 0.1, 1.0)}});
  cases.push_back({"sum mean weighted_sum", [](Graph<double>& g, P p) {
    const Var a = ops::sum(g, g.parameter(p[0]));
    const Var b = ops::mean(g, ops::mul(g, g.parameter(p[0]), g.parameter(p[0])));
    const std::vector<Var> parts{a, b};
    const std::vector<double> w{0.3, 1.9};
    return ops::weighted_sum<double>(g, parts, w);
  }, {random_parameter("x", {3, 4}, rng)}});

  rng.seed(41);
  for (auto [pad, name] : {std::pair{Padding::same, "same"}, {Padding::valid, "valid"}}) {
    cases.push_back({std::string("conv2d ") + name, [pad](Graph<double>& g, P p) {
      return project(g, ops::conv2d(g, g.parameter(p[0]), g.parameter(p[1]), ops::ConvOptions{2, 2, pad}));
    }, {random_parameter("x", {2, 5, 6, 3}, rng), random_parameter("f", {3, 3, 3, 4}, rng)}});
    cases.push_back({std::string("conv2d_transpose ") + name, [pad](Graph<double>& g, P p) {
      return project(g, ops::conv2d_transpose(g, g.parameter(p[0]), g.parameter(p[1]), ops::ConvOptions{2, 2, pad}));
    }, {random_parameter("x", {2, 3, 4, 3}, rng), random_parameter("f", {4, 4, 2, 3}, rng)}});
  }
  for (auto [mode, name] : {std::pair{Mode::train, "train"}, {Mode::inference, "inference"}}) {
    const ops::BatchNormStats<double> running{random_tensor({4}, rng), random_tensor({4}, rng, 0.5, 2.0)};
    cases.push_back({std::string("batch_norm ") + name, [mode, running](Graph<double>& g, P p) {
      ops::BatchNormStats<double> copy = running;
      ops::BatchNormOptions opt;
      opt.mode = mode;
      opt.update_running = false;
      return project(g, ops::batch_norm(g, g.parameter(p[0]), g.parameter(p[1]), g.parameter(p[2]), copy, opt));
    }, {random_parameter("x", {3, 4}, rng), random_parameter("gamma", {4}, rng), random_parameter("beta", {4}, rng)}});
  }
  cases.push_back({"dropout fixed mask", [](Graph<double>& g, P p) {
    Rng local(77);
    return project(g, ops::dropout(g, g.parameter(p[0]), 0.5, Mode::train, local));
  }, {random_parameter("x", {3, 4}, rng)}});
  cases.push_back({"global_avg_pool", [](Graph<double>& g, P p) {
    return project(g, ops::global_avg_pool(g, g.parameter(p[0])));
  }, {random_parameter("x", {2, 3, 4, 5}, rng)}});

  rng.seed(51);
  const Tensor<double> targets = random_tensor({3, 4}, rng, 0.0, 1.0);
  cases.push_back({"sigmoid_cross_entropy", [targets](Graph<double>& g, P p) {
    return ops::mean(g, ops::sigmoid_cross_entropy(g, g.parameter(p[0]), g.constant(targets)));
  }, {random_parameter("z", {3, 4}, rng, -3, 3)}});
  cases.push_back({"softmax_cross_entropy", [targets](Graph<double>& g, P p) {
    return ops::mean(g, ops::softmax_cross_entropy(g, g.parameter(p[0]), g.constant(targets)));
  }, {random_parameter("z", {3, 4}, rng, -3, 3)}});
  cases.push_back({"mse", [targets](Graph<double>& g, P p) {
    return ops::mse(g, g.parameter(p[0]), g.constant(targets));
  }, {random_parameter("z", {3, 4}, rng)}});
  cases.push_back({"one_minus_ccc", [](Graph<double>& g, P p) {
    return ops::one_minus_ccc(g, g.parameter(p[0]), g.parameter(p[1]));
  }, {random_parameter("x", {7}, rng), random_parameter("y", {7}, rng)}});
  cases.push_back({"huber", [](Graph<double>& g, P p) {
    return ops::mean(g, ops::huber(g, g.parameter(p[0]), 1.0));
  }, {random_parameter("a", {3, 4}, rng, -3, 3)}});
  return cases;
}

}  // namespace catgan::testing
