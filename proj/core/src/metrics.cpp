#include "catgan/metrics.hpp"

#include <cstdio>
#include <json.hpp>
#include <stdexcept>

namespace catgan::metrics {

void LabelBatch::validate() const {
  for (const auto& flags : au) {
    for (auto f : flags) {
      if (f > 1) throw std::invalid_argument("AU labels must be 0 or 1");
    }
  }
  for (const auto* series : {&valence, &arousal}) {
    for (double v : *series) {
      if (!(v >= -1.0 && v <= 1.0)) throw std::invalid_argument("valence/arousal must lie in [-1, 1]");
    }
  }
}

BinaryScores binary_scores(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  BinaryScores s;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  s.tn = tn;
  if (tp + fp == 0) {
    s.precision_degenerate = true;
  } else {
    s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    s.recall_degenerate = true;
  } else {
    s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (s.precision + s.recall == 0.0) {
    s.f1_degenerate = true;
  } else {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  const std::size_t total = tp + fp + fn + tn;
  if (total > 0) s.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
  return s;
}

ClassificationReport classification_metrics(std::span<const AuFlags> predicted,
                                            std::span<const AuFlags> truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("classification_metrics: " + std::to_string(predicted.size()) +
                                " predictions for " + std::to_string(truth.size()) + " labels");
  }
  ClassificationReport report;
  for (std::size_t au = 0; au < kActionUnits; ++au) {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const auto p = predicted[i][au];
      const auto t = truth[i][au];
      if (p > 1 || t > 1) throw std::invalid_argument("classification_metrics: flags must be binary");
      if (p && t) ++tp;
      else if (p && !t) ++fp;
      else if (!p && t) ++fn;
      else ++tn;
    }
    report.per_au[au] = binary_scores(tp, fp, fn, tn);
    report.mean_f1 += report.per_au[au].f1;
    report.mean_accuracy += report.per_au[au].accuracy;
  }
  report.mean_f1 /= static_cast<double>(kActionUnits);
  report.mean_accuracy /= static_cast<double>(kActionUnits);
  report.mean_of_means = 0.5 * (report.mean_f1 + report.mean_accuracy);
  return report;
}

double pct_real_as_real(std::span<const double> fake_probs, std::span<const std::uint8_t> real_flags) {
  if (fake_probs.size() != real_flags.size()) {
    throw std::invalid_argument("pct_real_as_real: length mismatch");
  }
  std::size_t real = 0, kept = 0;
  for (std::size_t i = 0; i < fake_probs.size(); ++i) {
    if (real_flags[i] != 0) continue;
    ++real;
    if (fake_probs[i] < 0.5) ++kept;
  }
  if (real == 0) throw std::invalid_argument("pct_real_as_real: batch holds no real image");
  return static_cast<double>(kept) / static_cast<double>(real);
}

std::vector<MetricField> fields(const MetricsReport& report) {
  std::vector<MetricField> out;
  for (std::size_t au = 0; au < kActionUnits; ++au) {
    const std::string prefix = "au" + std::to_string(kActionUnitIds[au]) + "_";
    std::optional<BinaryScores> s;
    if (report.au) s = report.au->per_au[au];
    out.emplace_back(prefix + "precision", s ? std::optional(s->precision) : std::nullopt);
    out.emplace_back(prefix + "recall", s ? std::optional(s->recall) : std::nullopt);
    out.emplace_back(prefix + "f1", s ? std::optional(s->f1) : std::nullopt);
    out.emplace_back(prefix + "accuracy", s ? std::optional(s->accuracy) : std::nullopt);
  }
  const auto& au = report.au;
  out.emplace_back("mean_f1", au ? std::optional(au->mean_f1) : std::nullopt);
  out.emplace_back("mean_accuracy", au ? std::optional(au->mean_accuracy) : std::nullopt);
  out.emplace_back("mean_of_means", au ? std::optional(au->mean_of_means) : std::nullopt);
  out.emplace_back("ccc_valence", report.ccc_valence);
  out.emplace_back("ccc_arousal", report.ccc_arousal);
  out.emplace_back("mse_valence", report.mse_valence);
  out.emplace_back("mse_arousal", report.mse_arousal);
  out.emplace_back("pct_real_as_real", report.pct_real_as_real);
  out.emplace_back("class_accuracy", report.class_accuracy);
  return out;
}

std::vector<std::string> field_names() {
  std::vector<std::string> names;
  for (auto& [name, value] : fields(MetricsReport{})) names.push_back(name);
  return names;
}

bool higher_is_better(std::string_view field) { return !field.starts_with("mse_"); }

namespace {

std::string format_value(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", *v);
  return buf;
}

}  // namespace

std::string tsv_header() {
  std::string line = "iteration\tside";
  for (const auto& name : field_names()) line += "\t" + name;
  return line;
}

std::string tsv_row(const MetricsReport& report, std::string_view side) {
  std::string line = std::to_string(report.iteration) + "\t" + std::string(side);
  for (const auto& [name, value] : fields(report)) line += "\t" + format_value(value);
  return line;
}

std::string to_text(const MetricsReport& report) {
  std::string line = "iteration=" + std::to_string(report.iteration);
  for (const auto& [name, value] : fields(report)) line += " " + name + "=" + format_value(value);
  return line;
}

std::string to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["iteration"] = report.iteration;
  for (const auto& [name, value] : fields(report)) {
    if (value) {
      j[name] = *value;
    } else {
      j[name] = nullptr;
    }
  }
  if (report.au) {
    for (std::size_t au = 0; au < kActionUnits; ++au) {
      const auto& s = report.au->per_au[au];
      const std::string prefix = "au" + std::to_string(kActionUnitIds[au]) + "_";
      j[prefix + "precision_degenerate"] = s.precision_degenerate;
      j[prefix + "recall_degenerate"] = s.recall_degenerate;
      j[prefix + "f1_degenerate"] = s.f1_degenerate;
    }
  }
  return j.dump();
}

}  // namespace catgan::metrics
