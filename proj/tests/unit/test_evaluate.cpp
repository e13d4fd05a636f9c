#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include "catgan/checkpoint.hpp"
#include "catgan/evaluate.hpp"
#include "fixtures.hpp"

using namespace catgan;
using catgan::testing::fresh_dir;

namespace {

const HeadVariant kJoint = HeadVariant::joint(VaLoss::mse, JointWeighting::equal);

// A discriminator whose logits equal `bias` for every input: all weights are
// zero, so only the final affine bias reaches the head.
void write_constant_checkpoint(const std::filesystem::path& dir, std::uint64_t iteration,
                               const std::vector<double>& bias) {
  ModelConfig config;
  config.head = kJoint;
  Rng rng(1);
  auto model = build_model<double>(config, rng);
  for (auto& p : model.discriminator.parameters()) {
    for (auto& v : p.value.values()) v = 0.0;
    if (p.name == "discriminator.fc.b") {
      REQUIRE(p.value.size() == bias.size());
      for (std::size_t i = 0; i < bias.size(); ++i) p.value[i] = bias[i];
    }
  }
  write_checkpoint(dir / checkpoint_filename(iteration), snapshot(model, iteration, rng));
}

// Four test images; AU1 is present in 3, AU2 and AU25 in 1, the rest never.
ImageSet hand_test_set() {
  auto set = catgan::testing::synthetic_set(kJoint, 4, 28, 3, 5);
  set.labels.au = {metrics::AuFlags{1, 1, 0, 0, 0, 0, 0, 0}, metrics::AuFlags{1, 0, 0, 0, 0, 0, 0, 0},
                   metrics::AuFlags{}, metrics::AuFlags{1, 0, 0, 0, 0, 0, 0, 1}};
  set.labels.valence = {0.5, 0.5, 0.5, 0.5};
  set.labels.arousal = {0.2, -0.2, 0.2, -0.2};
  return set;
}

const BestScore& best(const SweepResult& r, const std::string& metric) {
  for (const auto& b : r.best) {
    if (b.metric == metric) return b;
  }
  FAIL("missing metric " << metric);
  return r.best.front();
}

// v, a, eight AU logits, real/fake logit.
const std::vector<double> kAllPresent{0.5, 0.0, 1, 1, 1, 1, 1, 1, 1, 1, -2.0};
const std::vector<double> kAllAbsent{0.0, 0.0, -1, -1, -1, -1, -1, -1, -1, -1, 2.0};

}  // namespace

TEST_CASE("a single checkpoint wins every defined metric") {
  const auto dir = fresh_dir("eval_single");
  write_constant_checkpoint(dir, 5000, kAllPresent);
  const auto r = evaluate_checkpoints<double>(dir, hand_test_set());
  REQUIRE(r.scored.size() == 1);
  for (const auto& b : r.best) {
    if (b.metric == "class_accuracy") {
      CHECK_FALSE(b.value.has_value());
    } else {
      CHECK(b.value.has_value());
      CHECK(b.iteration == 5000);
    }
  }
}

TEST_CASE("two checkpoints against a hand-computed table") {
  const auto dir = fresh_dir("eval_two");
  write_constant_checkpoint(dir, 2000, kAllAbsent);
  write_constant_checkpoint(dir, 1000, kAllPresent);
  const auto r = evaluate_checkpoints<double>(dir, hand_test_set());
  REQUIRE(r.scored.size() == 2);
  CHECK(r.scored[0].iteration == 1000);
  CHECK(r.warnings.empty());

  // Predicting every AU present: AU1 precision 3/4, F1 6/7; AU2 and AU25 F1 0.4.
  CHECK(best(r, "au1_precision").value == doctest::Approx(0.75));
  CHECK(best(r, "au1_precision").iteration == 1000);
  CHECK(best(r, "au1_f1").value == doctest::Approx(6.0 / 7.0));
  const double f1_all = (6.0 / 7.0 + 0.4 + 0.4) / 8.0;
  const double acc_none = (0.25 + 0.75 + 0.75 + 5.0) / 8.0;
  CHECK(best(r, "mean_f1").value == doctest::Approx(f1_all));
  CHECK(best(r, "mean_f1").iteration == 1000);
  CHECK(best(r, "mean_accuracy").value == doctest::Approx(acc_none));
  CHECK(best(r, "mean_accuracy").iteration == 2000);
  CHECK(best(r, "au4_accuracy").value == 1.0);
  CHECK(best(r, "au4_accuracy").iteration == 2000);
  CHECK(best(r, "mean_of_means").value == doctest::Approx(acc_none / 2));
  CHECK(best(r, "mean_of_means").iteration == 2000);
  REQUIRE(r.best_of_best_mean.has_value());
  CHECK(*r.best_of_best_mean == doctest::Approx((f1_all + acc_none) / 2));

  // Lower wins for MSE; equal arousal errors tie and the earlier checkpoint keeps it.
  CHECK(best(r, "mse_valence").value == 0.0);
  CHECK(best(r, "mse_valence").iteration == 1000);
  CHECK(best(r, "mse_arousal").value == doctest::Approx(0.04));
  CHECK(best(r, "mse_arousal").iteration == 1000);
  CHECK(best(r, "ccc_valence").value == 1.0);
  CHECK(best(r, "pct_real_as_real").value == 1.0);
  CHECK(best(r, "pct_real_as_real").iteration == 1000);

  const auto table = format_table(r);
  CHECK(table.find("mean_f1") != std::string::npos);
  CHECK(table.find("(1)\n") != std::string::npos);
  CHECK(table.find("(2)\n") != std::string::npos);
  const auto csv = to_csv(r);
  CHECK(csv.starts_with("metric,best,iteration\n"));
  CHECK(csv.find("mse_valence,0,1000\n") != std::string::npos);
  CHECK(csv.find("class_accuracy,NA,NA\n") != std::string::npos);
}

TEST_CASE("ties go to the earliest iteration") {
  const auto dir = fresh_dir("eval_tie");
  for (std::uint64_t it : {3000u, 1000u, 2000u}) write_constant_checkpoint(dir, it, kAllPresent);
  const auto r = evaluate_checkpoints<double>(dir, hand_test_set());
  for (const auto& b : r.best) {
    if (b.value) CHECK(b.iteration == 1000);
  }
}

TEST_CASE("corrupt checkpoints are skipped with a warning") {
  const auto dir = fresh_dir("eval_corrupt");
  write_constant_checkpoint(dir, 1000, kAllPresent);
  std::ofstream(dir / "ckpt-000002000.cgan") << "not a checkpoint";
  const auto r = evaluate_checkpoints<double>(dir, hand_test_set());
  CHECK(r.scored.size() == 1);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("ckpt-000002000.cgan") != std::string::npos);
}

TEST_CASE("nothing to evaluate is an error") {
  const auto empty = fresh_dir("eval_empty");
  CHECK_THROWS_WITH_AS(evaluate_checkpoints<double>(empty, hand_test_set()), doctest::Contains("no checkpoints"),
                       EvaluationError);
  CHECK_THROWS_AS(evaluate_checkpoints<double>(empty / "absent", hand_test_set()), EvaluationError);
  std::ofstream(empty / "bad.cgan") << "junk";
  CHECK_THROWS_AS(evaluate_checkpoints<double>(empty, hand_test_set()), EvaluationError);
}

TEST_CASE("select_best orders by iteration regardless of input order") {
  metrics::MetricsReport a, b;
  a.iteration = 2000;
  a.ccc_arousal = 0.4;
  b.iteration = 1000;
  b.ccc_arousal = 0.4;
  const auto r = select_best({{2000, a}, {1000, b}});
  CHECK(r.scored.front().iteration == 1000);
  CHECK(best(r, "ccc_arousal").iteration == 1000);
  CHECK_FALSE(r.best_of_best_mean.has_value());
}
