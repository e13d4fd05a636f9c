#include "catgan/dataset/stats.hpp"

#include <cstdio>
#include <stdexcept>

namespace catgan::dataset {

double Histogram::bin_center(std::size_t i) const {
  const double width = (hi - lo) / static_cast<double>(counts.size());
  return lo + (static_cast<double>(i) + 0.5) * width;
}

Histogram make_histogram(const std::vector<double>& values, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram: need bins > 0 and hi > lo");
  Histogram h{lo, hi, std::vector<std::uint64_t>(bins, 0)};
  for (double v : values) {
    if (v < lo || v > hi) throw std::invalid_argument("histogram: value " + std::to_string(v) + " outside range");
    auto i = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    ++h.counts[std::min(i, bins - 1)];
  }
  return h;
}

namespace {

SplitStats summarize(const std::string& name, const std::vector<const AnnotationRecord*>& records, std::size_t bins) {
  SplitStats s;
  s.name = name;
  s.records = records.size();
  std::vector<double> v, a;
  v.reserve(records.size());
  a.reserve(records.size());
  for (const auto* r : records) {
    v.push_back(r->valence);
    a.push_back(r->arousal);
    for (std::size_t k = 0; k < metrics::kActionUnits; ++k) {
      if (r->au_presence[k]) {
        ++s.au_counts[k];
        s.au_va_points[k].emplace_back(r->valence, r->arousal);
      }
    }
  }
  s.au_percent = au_percentages(s.au_counts);
  s.valence = make_histogram(v, bins);
  s.arousal = make_histogram(a, bins);
  return s;
}

std::string fmt(const char* f, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

StatsReport compute_stats(const std::vector<NamedRecords>& splits, std::size_t bins) {
  StatsReport report;
  std::vector<const AnnotationRecord*> all;
  for (const auto& split : splits) {
    std::vector<const AnnotationRecord*> mine;
    for (const auto& r : split.records) mine.push_back(&r);
    all.insert(all.end(), mine.begin(), mine.end());
    report.splits.push_back(summarize(split.name, mine, bins));
  }
  report.splits.push_back(summarize("total", all, bins));
  return report;
}

std::string au_csv(const StatsReport& report) {
  std::string out = "split,au,count,percent\n";
  for (const auto& s : report.splits) {
    for (std::size_t k = 0; k < metrics::kActionUnits; ++k) {
      out += s.name + "," + std::to_string(metrics::kActionUnitIds[k]) + "," + std::to_string(s.au_counts[k]) + "," +
             fmt("%.2f", s.au_percent[k]) + "\n";
    }
  }
  return out;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_center,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) out += fmt("%.4f", h.bin_center(i)) + "," + std::to_string(h.counts[i]) + "\n";
  return out;
}

std::string scatter_csv(const SplitStats& split) {
  std::string out = "au,valence,arousal\n";
  for (std::size_t k = 0; k < metrics::kActionUnits; ++k) {
    for (const auto& [v, a] : split.au_va_points[k]) {
      out += std::to_string(metrics::kActionUnitIds[k]) + "," + fmt("%.6g", v) + "," + fmt("%.6g", a) + "\n";
    }
  }
  return out;
}

}  // namespace catgan::dataset
