#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace catgan::metrics {

inline constexpr std::size_t kActionUnits = 8;
/// FACS ids of the annotated action units, in label order.
inline constexpr std::array<int, kActionUnits> kActionUnitIds{1, 2, 4, 6, 12, 15, 20, 25};

using AuFlags = std::array<std::uint8_t, kActionUnits>;

/// Ground truth for a batch. Only the fields relevant to a head are filled.
struct LabelBatch {
  std::vector<std::size_t> classes;
  std::vector<AuFlags> au;
  std::vector<double> valence;
  std::vector<double> arousal;
  std::vector<std::uint8_t> real_flag;  // 0 = real image, 1 = generated

  /// Throws std::invalid_argument if AU entries are not binary or VA leaves [-1, 1].
  void validate() const;
};

/// Confusion-matrix scores for one binary label. A zero denominator yields 0
/// and raises the matching *_degenerate flag.
struct BinaryScores {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool f1_degenerate = false;
};

BinaryScores binary_scores(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

struct ClassificationReport {
  std::array<BinaryScores, kActionUnits> per_au{};
  double mean_f1 = 0.0;
  double mean_accuracy = 0.0;
  double mean_of_means = 0.0;  // (mean_f1 + mean_accuracy) / 2
};

/// Per-AU precision/recall/F1/accuracy from already thresholded flags.
ClassificationReport classification_metrics(std::span<const AuFlags> predicted,
                                            std::span<const AuFlags> truth);

/// Fraction of real images (real_flag == 0) whose fake-probability is below 0.5.
/// Throws if the batch holds no real image.
double pct_real_as_real(std::span<const double> fake_probs, std::span<const std::uint8_t> real_flags);

/// Evaluation snapshot. Absent groups do not apply to the head that produced it.
struct MetricsReport {
  std::optional<ClassificationReport> au;
  std::optional<double> ccc_valence;
  std::optional<double> ccc_arousal;
  std::optional<double> mse_valence;
  std::optional<double> mse_arousal;
  std::optional<double> pct_real_as_real;
  std::optional<double> class_accuracy;  // exclusive k-class heads
  std::uint64_t iteration = 0;
};

using MetricField = std::pair<std::string, std::optional<double>>;

/// Flat view in serialization order: per-AU precision/recall/f1/accuracy,
/// mean_f1, mean_accuracy, mean_of_means, ccc_valence, ccc_arousal,
/// mse_valence, mse_arousal, pct_real_as_real, class_accuracy.
std::vector<MetricField> fields(const MetricsReport& report);
std::vector<std::string> field_names();

/// MSE fields are minimized; every other field is maximized.
bool higher_is_better(std::string_view field);

/// Tab-separated header / row: "iteration\tside\t<fields...>"; absent values print as NA.
std::string tsv_header();
std::string tsv_row(const MetricsReport& report, std::string_view side);

/// Single line of space-separated key=value pairs, starting with iteration.
std::string to_text(const MetricsReport& report);

/// JSON object with every field (null when absent) and per-AU degenerate flags.
std::string to_json(const MetricsReport& report);

}  // namespace catgan::metrics
