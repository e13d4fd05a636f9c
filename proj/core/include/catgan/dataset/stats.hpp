#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "catgan/dataset/annotations.hpp"
#include "catgan/dataset/split.hpp"

namespace catgan::dataset {

/// Equal-width bins over [lo, hi]; hi itself falls in the last bin.
struct Histogram {
  double lo = -1.0;
  double hi = 1.0;
  std::vector<std::uint64_t> counts;

  double bin_center(std::size_t i) const;
};

Histogram make_histogram(const std::vector<double>& values, std::size_t bins = 40, double lo = -1.0, double hi = 1.0);

struct SplitStats {
  std::string name;
  std::uint64_t records = 0;
  AuCounts au_counts{};
  std::array<double, metrics::kActionUnits> au_percent{};
  Histogram valence;
  Histogram arousal;
  /// (valence, arousal) of every frame where the AU is present.
  std::array<std::vector<std::pair<double, double>>, metrics::kActionUnits> au_va_points;
};

struct StatsReport {
  std::vector<SplitStats> splits;  // input order, then "total"
};

struct NamedRecords {
  std::string name;
  std::vector<AnnotationRecord> records;
};

StatsReport compute_stats(const std::vector<NamedRecords>& splits, std::size_t bins = 40);

/// split,au,count,percent with one row per AU per split.
std::string au_csv(const StatsReport& report);
/// bin_center,count
std::string histogram_csv(const Histogram& h);
/// au,valence,arousal
std::string scatter_csv(const SplitStats& split);

}  // namespace catgan::dataset
