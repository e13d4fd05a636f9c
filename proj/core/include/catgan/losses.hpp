#pragma once

#include <cstddef>
#include <span>
#include <vector>

/// Plain (non-differentiable) cost functions used for evaluation and as
/// references for the graph ops of the same name.
namespace catgan::losses {

/// (1/n) sum (pred - obs)^2. Throws on empty or mismatched input.
double mse(std::span<const double> pred, std::span<const double> obs);

/// Concordance correlation coefficient 2 cov / (var_x + var_y + (mu_x - mu_y)^2)
/// with population moments. Two identical constants give 1. Needs n >= 2.
double ccc(std::span<const double> x, std::span<const double> y);

inline double one_minus_ccc(std::span<const double> x, std::span<const double> y) {
  return 1.0 - ccc(x, y);
}

/// 0.5 a^2 for |a| <= delta, delta (|a| - 0.5 delta) otherwise.
double huber(double residual, double delta);

/// H(p, q) = -sum p_i log q_i, where p is the reference distribution.
double cross_entropy(std::span<const double> p, std::span<const double> q);

/// max(z, 0) - z t + log(1 + exp(-|z|)), elementwise.
std::vector<double> sigmoid_ce(std::span<const double> logits, std::span<const double> targets);

/// -sum t log softmax(z), evaluated with log-sum-exp.
double softmax_ce(std::span<const double> logits, std::span<const double> targets);

/// Target for generated images over n category nodes plus the fake node:
/// n copies of (1 - alpha) / n followed by alpha.
std::vector<double> fake_label(std::size_t n, double alpha);

}  // namespace catgan::losses
