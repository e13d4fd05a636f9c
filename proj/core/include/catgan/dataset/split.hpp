#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "catgan/metrics.hpp"

namespace catgan::dataset {

using AuCounts = std::array<std::uint64_t, metrics::kActionUnits>;

struct VideoMeta {
  std::string video_id;
  std::string identity_id;
  std::uint64_t frame_count = 0;
  double fps = 30.0;
  AuCounts au_counts{};  // frames in which each AU is present
};

/// Share of each AU among all AU labels of a group, in percent; zeros when the group has none.
std::array<double, metrics::kActionUnits> au_percentages(const AuCounts& counts);

struct AuGap {
  std::size_t au_index = 0;  // into metrics::kActionUnitIds
  double train_pct = 0.0;
  double test_pct = 0.0;
  double gap = 0.0;          // |train_pct - test_pct|
};

struct SplitOptions {
  double target_fraction = 0.8;
  double min_fraction = 0.78;
  double max_fraction = 0.86;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
};

struct SplitResult {
  std::vector<std::string> train_ids;  // manifest order
  std::vector<std::string> test_ids;
  double train_fraction = 0.0;         // of frames
  std::vector<AuGap> gaps;             // one per AU
  double max_gap = 0.0;
  std::size_t valid_trials = 0;
};

class SplitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Identity-closed random fills of the training side until it holds at least
/// target_fraction of the frames; among trials landing in [min, max] fraction
/// the one with the smallest maximum AU percentage gap wins (earliest on ties).
SplitResult split_dataset(const std::vector<VideoMeta>& videos, const SplitOptions& options = {});

/// Gap report for a given partition of AU counts.
std::vector<AuGap> au_gaps(const AuCounts& train, const AuCounts& test);

}  // namespace catgan::dataset
