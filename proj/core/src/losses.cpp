#include "catgan/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace catgan::losses {

namespace {

void require_pair(std::span<const double> a, std::span<const double> b, const char* op) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(op) + ": lengths " + std::to_string(a.size()) +
                                " and " + std::to_string(b.size()) + " differ");
  }
  if (a.empty()) throw std::invalid_argument(std::string(op) + ": empty input");
}

}  // namespace

double mse(std::span<const double> pred, std::span<const double> obs) {
  require_pair(pred, obs, "mse");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += (pred[i] - obs[i]) * (pred[i] - obs[i]);
  return total / static_cast<double>(pred.size());
}

double ccc(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y, "ccc");
  if (x.size() < 2) throw std::invalid_argument("ccc: needs at least 2 samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double denom = (sxx + syy) / n + (mx - my) * (mx - my);
  if (!(denom > 0.0)) return 1.0;
  return 2.0 * (sxy / n) / denom;
}

double huber(double residual, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("huber: delta must be positive");
  const double a = std::abs(residual);
  return a <= delta ? 0.5 * a * a : delta * (a - 0.5 * delta);
}

double cross_entropy(std::span<const double> p, std::span<const double> q) {
  require_pair(p, q, "cross_entropy");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != 0.0) total -= p[i] * std::log(q[i]);
  }
  return total;
}

std::vector<double> sigmoid_ce(std::span<const double> logits, std::span<const double> targets) {
  require_pair(logits, targets, "sigmoid_ce");
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i];
    out[i] = std::max(z, 0.0) - z * targets[i] + std::log1p(std::exp(-std::abs(z)));
  }
  return out;
}

double softmax_ce(std::span<const double> logits, std::span<const double> targets) {
  require_pair(logits, targets, "softmax_ce");
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - peak);
  const double lse = peak + std::log(total);
  double loss = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) loss += targets[i] * (lse - logits[i]);
  return loss;
}

std::vector<double> fake_label(std::size_t n, double alpha) {
  if (n == 0) throw std::invalid_argument("fake_label: n must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("fake_label: alpha must lie in [0, 1]");
  std::vector<double> out(n, (1.0 - alpha) / static_cast<double>(n));
  out.push_back(alpha);
  return out;
}

}  // namespace catgan::losses
