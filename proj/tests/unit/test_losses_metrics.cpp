#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "catgan/losses.hpp"
#include "catgan/metrics.hpp"
#include "oracles.hpp"

using namespace catgan;
using metrics::AuFlags;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("mse examples") {
  const std::vector<double> a{0.3, -0.2, 0.9};
  CHECK(losses::mse(a, a) == 0.0);
  CHECK(losses::mse(std::vector<double>{1, 1}, std::vector<double>{0, 2}) == 1.0);
  CHECK(losses::mse(std::vector<double>{0.5}, std::vector<double>{0.0}) == 0.25);
  CHECK_THROWS_AS(losses::mse(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(losses::mse(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("ccc examples and conventions") {
  const std::vector<double> x{0.1, -0.4, 0.7, 0.2};
  CHECK(losses::ccc(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(losses::ccc(std::vector<double>{1, 2, 3}, std::vector<double>{2, 2, 2}) == 0.0);
  CHECK(losses::ccc(std::vector<double>{0.3, 0.3}, std::vector<double>{0.3, 0.3}) == 1.0);
  CHECK(losses::ccc(std::vector<double>{0.3, 0.3}, std::vector<double>{-0.1, -0.1}) == 0.0);
  CHECK(losses::one_minus_ccc(x, x) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(losses::ccc(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("ccc matches the raw-moment oracle and its invariants") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    const auto x = random_vector(rng, n);
    const auto y = random_vector(rng, n, -0.5, 0.8);
    const double c = losses::ccc(x, y);
    CHECK(std::abs(c - oracle::ccc(x, y)) < 1e-12);
    CHECK(c == doctest::Approx(losses::ccc(y, x)).epsilon(1e-14));
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);

    // Mirroring about the mean gives perfect discordance.
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
    std::vector<double> mirror(n);
    for (std::size_t i = 0; i < n; ++i) mirror[i] = -x[i] + 2.0 * mean;
    CHECK(losses::ccc(x, mirror) == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("huber branches, knee and convexity") {
  CHECK(losses::huber(0.5, 1.0) == 0.125);
  CHECK(losses::huber(2.0, 1.0) == 1.5);
  CHECK(losses::huber(-2.0, 1.0) == 1.5);
  for (double delta : {0.3, 1.0, 2.5}) {
    CHECK(losses::huber(delta, delta) == doctest::Approx(delta * delta / 2));
    CHECK(losses::huber(-delta, delta) == doctest::Approx(delta * delta / 2));
    const double eps = 1e-7;
    const double left = (losses::huber(delta, delta) - losses::huber(delta - eps, delta)) / eps;
    const double right = (losses::huber(delta + eps, delta) - losses::huber(delta, delta)) / eps;
    CHECK(left == doctest::Approx(right).epsilon(1e-5));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng), b = u(rng), delta = 0.1 + std::abs(u(rng));
    if (std::abs(a) <= delta) CHECK(losses::huber(a, delta) == doctest::Approx(0.5 * a * a));
    CHECK(losses::huber((a + b) / 2, delta) <= (losses::huber(a, delta) + losses::huber(b, delta)) / 2 + 1e-12);
  }
  CHECK_THROWS_AS(losses::huber(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("cross entropy family") {
  const std::vector<double> p{0.2, 0.8}, q{0.5, 0.5};
  CHECK(losses::cross_entropy(p, q) == doctest::Approx(std::log(2.0)));
  CHECK(losses::sigmoid_ce(std::vector<double>{0.0}, std::vector<double>{0.5})[0] == doctest::Approx(std::log(2.0)));
  const double saturated = losses::sigmoid_ce(std::vector<double>{50.0}, std::vector<double>{1.0})[0];
  CHECK(std::isfinite(saturated));
  CHECK(saturated < 1e-20);
  const double wrong = losses::sigmoid_ce(std::vector<double>{-800.0}, std::vector<double>{1.0})[0];
  CHECK(wrong == doctest::Approx(800.0));
  for (std::size_t k : {2u, 5u, 11u}) {
    std::vector<double> logits(k, 3.7), target(k, 0.0);
    target[k / 2] = 1.0;
    CHECK(losses::softmax_ce(logits, target) == doctest::Approx(std::log(double(k))));
  }
  // Large logits stay finite through log-sum-exp.
  CHECK(std::isfinite(losses::softmax_ce(std::vector<double>{1000, -1000}, std::vector<double>{0, 1})));

  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto z = random_vector(rng, 6, -8, 8);
    const auto t = random_vector(rng, 6, 0, 1);
    const auto got = losses::sigmoid_ce(z, t);
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double s = 1.0 / (1.0 + std::exp(-z[j]));
      CHECK(got[j] == doctest::Approx(-(t[j] * std::log(s) + (1 - t[j]) * std::log(1 - s))).epsilon(1e-10));
    }
  }
}

TEST_CASE("fake label is a probability vector") {
  const auto f = losses::fake_label(8, 0.9);
  REQUIRE(f.size() == 9);
  for (std::size_t i = 0; i < 8; ++i) CHECK(f[i] == doctest::Approx(0.0125).epsilon(1e-15));
  CHECK(f[8] == 0.9);
  const auto hard = losses::fake_label(8, 1.0);
  for (std::size_t i = 0; i < 8; ++i) CHECK(hard[i] == 0.0);
  CHECK(hard[8] == 1.0);
  for (std::size_t n : {1u, 2u, 3u, 10u}) {
    for (double alpha : {0.0, 0.37, 0.9, 1.0}) {
      const auto v = losses::fake_label(n, alpha);
      CHECK(v.size() == n + 1);
      CHECK(std::accumulate(v.begin(), v.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
      for (double e : v) CHECK(e >= 0.0);
    }
  }
}

TEST_CASE("binary scores hand oracle") {
  const auto s = metrics::binary_scores(2, 1, 1, 6);
  CHECK(s.precision == doctest::Approx(2.0 / 3));
  CHECK(s.recall == doctest::Approx(2.0 / 3));
  CHECK(s.f1 == doctest::Approx(2.0 / 3));
  CHECK(s.accuracy == doctest::Approx(0.8));
  CHECK_FALSE(s.precision_degenerate);
}

TEST_CASE("perfect and degenerate predictors") {
  std::mt19937_64 rng(9);
  const auto truth = oracle::random_flags(rng, 40, 0.5);
  const auto perfect = metrics::classification_metrics(truth, truth);
  for (const auto& s : perfect.per_au) {
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
    CHECK(s.accuracy == 1.0);
  }
  CHECK(perfect.mean_of_means == 1.0);

  const std::vector<AuFlags> none(truth.size(), AuFlags{});
  const auto lazy = metrics::classification_metrics(none, truth);
  for (std::size_t a = 0; a < metrics::kActionUnits; ++a) {
    std::size_t negatives = 0;
    for (const auto& t : truth) negatives += t[a] == 0;
    CHECK(lazy.per_au[a].precision == 0.0);
    CHECK(lazy.per_au[a].precision_degenerate);
    CHECK(lazy.per_au[a].accuracy == doctest::Approx(double(negatives) / double(truth.size())));
  }
}

TEST_CASE("classification metrics match the confusion-matrix oracle") {
  std::mt19937_64 rng(2024);
  for (int batch = 0; batch < 1000; ++batch) {
    const std::size_t n = 1 + rng() % 64;
    const double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto truth = oracle::random_flags(rng, n, density);
    const auto pred = oracle::random_flags(rng, n, 0.5);
    const auto report = metrics::classification_metrics(pred, truth);
    const auto cm = oracle::confusion(pred, truth);
    double f1 = 0, acc = 0;
    for (std::size_t a = 0; a < metrics::kActionUnits; ++a) {
      const auto want = oracle::scores(cm[a]);
      const auto& got = report.per_au[a];
      CHECK(got.tp == cm[a].cell[1][1]);
      CHECK(got.tn == cm[a].cell[0][0]);
      CHECK(got.precision == doctest::Approx(want.precision).epsilon(1e-12));
      CHECK(got.recall == doctest::Approx(want.recall).epsilon(1e-12));
      CHECK(got.f1 == doctest::Approx(want.f1).epsilon(1e-12));
      CHECK(got.accuracy == doctest::Approx(want.accuracy).epsilon(1e-12));
      if (!got.precision_degenerate && !got.recall_degenerate && !got.f1_degenerate) {
        CHECK(got.f1 >= std::min(got.precision, got.recall) - 1e-15);
        CHECK(got.f1 <= std::max(got.precision, got.recall) + 1e-15);
      }
      f1 += want.f1;
      acc += want.accuracy;
    }
    CHECK(report.mean_f1 == doctest::Approx(f1 / 8).epsilon(1e-12));
    CHECK(report.mean_accuracy == doctest::Approx(acc / 8).epsilon(1e-12));
    CHECK(report.mean_of_means == doctest::Approx((f1 + acc) / 16).epsilon(1e-12));
  }
}

TEST_CASE("pct_real_as_real counts real images under threshold") {
  CHECK(metrics::pct_real_as_real(std::vector<double>{0, 0, 0}, std::vector<std::uint8_t>{0, 0, 0}) == 1.0);
  CHECK(metrics::pct_real_as_real(std::vector<double>{0.4, 0.6}, std::vector<std::uint8_t>{0, 0}) == 0.5);
  CHECK(metrics::pct_real_as_real(std::vector<double>{0.9, 0.1}, std::vector<std::uint8_t>{1, 0}) == 1.0);
  CHECK_THROWS_AS(metrics::pct_real_as_real(std::vector<double>{0.1}, std::vector<std::uint8_t>{1}),
                  std::invalid_argument);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng() % 30;
    auto probs = random_vector(rng, n, 0, 1);
    std::vector<std::uint8_t> flags(n);
    for (auto& f : flags) f = rng() % 3 == 0;
    flags[0] = 0;
    std::size_t real = 0, kept = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (flags[j] == 0) {
        ++real;
        kept += probs[j] < 0.5;
      }
    }
    CHECK(metrics::pct_real_as_real(probs, flags) == double(kept) / double(real));
  }
}

TEST_CASE("label batch validation") {
  metrics::LabelBatch ok;
  ok.au = {AuFlags{1, 0, 0, 0, 0, 0, 0, 1}};
  ok.valence = {1.0};
  ok.arousal = {-1.0};
  CHECK_NOTHROW(ok.validate());
  auto bad = ok;
  bad.au[0][3] = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.valence[0] = 1.0001;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.arousal[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("report serialization keeps field order and marks absent values") {
  metrics::MetricsReport r;
  r.iteration = 3000;
  r.ccc_valence = 0.5;
  r.mse_arousal = 0.125;
  const auto names = metrics::field_names();
  REQUIRE(names.size() == 8 * 4 + 3 + 6);
  CHECK(names.front() == "au1_precision");
  CHECK(names.back() == "class_accuracy");
  CHECK(metrics::tsv_header().starts_with("iteration\tside\tau1_precision\t"));
  const auto row = metrics::tsv_row(r, "test");
  CHECK(row.starts_with("3000\ttest\tNA\t"));
  CHECK(row.find("\t0.5\t") != std::string::npos);
  CHECK(metrics::to_text(r).find("mse_arousal=0.125") != std::string::npos);
  const auto json = metrics::to_json(r);
  CHECK(json.find("\"ccc_valence\":0.5") != std::string::npos);
  CHECK(json.find("\"mean_f1\":null") != std::string::npos);
  CHECK(metrics::higher_is_better("ccc_valence"));
  CHECK_FALSE(metrics::higher_is_better("mse_valence"));
}
