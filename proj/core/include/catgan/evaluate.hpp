#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catgan/data.hpp"
#include "catgan/metrics.hpp"

namespace catgan {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScoredCheckpoint {
  std::uint64_t iteration = 0;
  metrics::MetricsReport report;
};

struct BestScore {
  std::string metric;
  std::optional<double> value;  // empty when no checkpoint defines the metric
  std::uint64_t iteration = 0;
};

struct SweepResult {
  std::vector<ScoredCheckpoint> scored;  // ascending iteration
  std::vector<BestScore> best;           // metrics::field_names() order
  /// Mean of the best mean_f1 and best mean_accuracy, which may come from
  /// different checkpoints; mean_of_means is the same-checkpoint counterpart.
  std::optional<double> best_of_best_mean;
  std::vector<std::string> warnings;
};

/// Best value per metric; lower wins for mse_* fields, higher otherwise. Ties
/// go to the earliest iteration.
SweepResult select_best(std::vector<ScoredCheckpoint> scored);

/// Scores every *.cgan file of `dir` on the full `test` set with the
/// discriminator in inference mode. Unreadable files are skipped with a
/// warning; throws EvaluationError("no checkpoints ...") when none load.
template <typename T>
SweepResult evaluate_checkpoints(const std::filesystem::path& dir, const ImageSet& test);

/// Two-line layout per metric: the best score, then the iteration in thousands.
std::string format_table(const SweepResult& result);
/// metric,best,iteration rows with a header.
std::string to_csv(const SweepResult& result);

}  // namespace catgan
