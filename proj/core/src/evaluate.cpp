#include "catgan/evaluate.hpp"

#include <algorithm>
#include <cstdio>

#include "catgan/checkpoint.hpp"
#include "catgan/train.hpp"

namespace catgan {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_precise(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_thousands(std::uint64_t iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", static_cast<double>(iteration) / 1000.0);
  return buf;
}

std::optional<double> best_of(const SweepResult& r, std::string_view metric) {
  for (const auto& b : r.best) {
    if (b.metric == metric) return b.value;
  }
  return std::nullopt;
}

}  // namespace

SweepResult select_best(std::vector<ScoredCheckpoint> scored) {
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredCheckpoint& a, const ScoredCheckpoint& b) { return a.iteration < b.iteration; });
  SweepResult result;
  for (const auto& name : metrics::field_names()) result.best.push_back({name, std::nullopt, 0});
  const bool any = !scored.empty();
  for (const auto& s : scored) {
    const auto fields = metrics::fields(s.report);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& value = fields[i].second;
      if (!value) continue;
      auto& best = result.best[i];
      const bool better = !best.value || (metrics::higher_is_better(best.metric) ? *value > *best.value
                                                                                 : *value < *best.value);
      // Strict comparison keeps the earliest iteration on ties.
      if (better) {
        best.value = value;
        best.iteration = s.iteration;
      }
    }
  }
  if (any) {
    const auto f1 = best_of(result, "mean_f1");
    const auto acc = best_of(result, "mean_accuracy");
    if (f1 && acc) result.best_of_best_mean = (*f1 + *acc) / 2.0;
  }
  result.scored = std::move(scored);
  return result;
}

template <typename T>
SweepResult evaluate_checkpoints(const std::filesystem::path& dir, const ImageSet& test) {
  if (!std::filesystem::is_directory(dir)) throw EvaluationError("no checkpoints: " + dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cgan") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw EvaluationError("no checkpoints in " + dir.string());
  if (test.size() == 0) throw EvaluationError("evaluation set is empty");

  metrics::LabelBatch labels = test.labels;
  labels.real_flag.assign(test.size(), 0);

  std::vector<ScoredCheckpoint> scored;
  std::vector<std::string> warnings;
  for (const auto& path : files) {
    CheckpointRecord record;
    GanModel<T> model;
    try {
      record = read_checkpoint(path);
      model = restore<T>(record);
    } catch (const std::exception& e) {
      // A decodable file can still carry an unbuildable configuration.
      warnings.push_back("skipping corrupt checkpoint " + path.string() + ": " + e.what());
      continue;
    }
    const auto logits = discriminator_logits(model, test);
    auto report = head_metrics(model.config.head, logits, labels);
    report.iteration = record.iteration;
    scored.push_back({record.iteration, std::move(report)});
  }
  if (scored.empty()) throw EvaluationError("no checkpoints could be read from " + dir.string());
  auto result = select_best(std::move(scored));
  result.warnings = std::move(warnings);
  return result;
}

std::string format_table(const SweepResult& result) {
  std::size_t width = 0;
  for (const auto& b : result.best) width = std::max(width, b.metric.size());
  width = std::max(width, std::string("best_of_best_mean").size());
  auto pad = [width](const std::string& s) { return s + std::string(width - s.size() + 2, ' '); };
  std::string out = pad("metric") + "best score / (iteration in thousands)\n";
  for (const auto& b : result.best) {
    if (!b.value) continue;
    out += pad(b.metric) + format_number(*b.value) + "\n";
    out += pad("") + "(" + format_thousands(b.iteration) + ")\n";
  }
  if (result.best_of_best_mean) out += pad("best_of_best_mean") + format_number(*result.best_of_best_mean) + "\n";
  return out;
}

std::string to_csv(const SweepResult& result) {
  std::string out = "metric,best,iteration\n";
  for (const auto& b : result.best) {
    out += b.metric + "," + (b.value ? format_precise(*b.value) : "NA") + "," +
           (b.value ? std::to_string(b.iteration) : "NA") + "\n";
  }
  if (result.best_of_best_mean) out += "best_of_best_mean," + format_precise(*result.best_of_best_mean) + ",NA\n";
  return out;
}

template SweepResult evaluate_checkpoints<float>(const std::filesystem::path&, const ImageSet&);
template SweepResult evaluate_checkpoints<double>(const std::filesystem::path&, const ImageSet&);

}  // namespace catgan
