#include "catgan/dataset/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace catgan::dataset {

std::array<double, metrics::kActionUnits> au_percentages(const AuCounts& counts) {
  std::array<double, metrics::kActionUnits> out{};
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) return out;
  for (std::size_t k = 0; k < counts.size(); ++k) out[k] = 100.0 * static_cast<double>(counts[k]) / static_cast<double>(total);
  return out;
}

std::vector<AuGap> au_gaps(const AuCounts& train, const AuCounts& test) {
  const auto a = au_percentages(train);
  const auto b = au_percentages(test);
  std::vector<AuGap> gaps;
  for (std::size_t k = 0; k < metrics::kActionUnits; ++k) gaps.push_back({k, a[k], b[k], std::abs(a[k] - b[k])});
  return gaps;
}

SplitResult split_dataset(const std::vector<VideoMeta>& videos, const SplitOptions& opt) {
  if (!(opt.min_fraction <= opt.target_fraction && opt.target_fraction <= opt.max_fraction) ||
      !(opt.min_fraction > 0.0 && opt.max_fraction < 1.0)) {
    throw std::invalid_argument("split: need 0 < min <= target <= max < 1");
  }
  if (opt.trials == 0) throw std::invalid_argument("split: at least one trial is required");

  // Group videos by identity; a group always moves as a whole.
  std::map<std::string, std::vector<std::size_t>> groups_by_id;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    if (videos[i].identity_id.empty()) throw std::invalid_argument("split: video " + videos[i].video_id + " has no identity");
    groups_by_id[videos[i].identity_id].push_back(i);
    total += videos[i].frame_count;
  }
  if (total == 0) throw std::invalid_argument("split: no frames");

  struct Group {
    std::vector<std::size_t> members;
    std::uint64_t frames = 0;
  };
  std::vector<Group> groups;
  for (auto& [id, members] : groups_by_id) {
    Group g{members, 0};
    for (std::size_t i : members) g.frames += videos[i].frame_count;
    if (static_cast<double>(g.frames) > opt.max_fraction * static_cast<double>(total)) {
      throw SplitError("identity " + id + " owns " + std::to_string(g.frames) + " of " + std::to_string(total) +
                       " frames; no identity-closed split can stay within the training fraction bound");
    }
    groups.push_back(std::move(g));
  }

  std::mt19937_64 rng(opt.seed);
  SplitResult best;
  bool found = false;
  std::vector<std::size_t> order(groups.size());
  for (std::size_t trial = 0; trial < opt.trials; ++trial) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> in_train(videos.size(), false);
    std::uint64_t train_frames = 0;
    for (std::size_t gi : order) {
      if (static_cast<double>(train_frames) >= opt.target_fraction * static_cast<double>(total)) break;
      for (std::size_t v : groups[gi].members) in_train[v] = true;
      train_frames += groups[gi].frames;
    }
    const double fraction = static_cast<double>(train_frames) / static_cast<double>(total);
    if (fraction < opt.min_fraction || fraction > opt.max_fraction) continue;

    AuCounts train{}, test{};
    for (std::size_t v = 0; v < videos.size(); ++v) {
      auto& side = in_train[v] ? train : test;
      for (std::size_t k = 0; k < side.size(); ++k) side[k] += videos[v].au_counts[k];
    }
    auto gaps = au_gaps(train, test);
    const double max_gap = std::max_element(gaps.begin(), gaps.end(), [](const AuGap& a, const AuGap& b) {
                             return a.gap < b.gap;
                           })->gap;
    ++best.valid_trials;
    if (found && max_gap >= best.max_gap) continue;
    found = true;
    best.train_ids.clear();
    best.test_ids.clear();
    for (std::size_t v = 0; v < videos.size(); ++v) (in_train[v] ? best.train_ids : best.test_ids).push_back(videos[v].video_id);
    best.train_fraction = fraction;
    best.gaps = std::move(gaps);
    best.max_gap = max_gap;
  }
  if (!found) {
    throw SplitError("no trial produced a training fraction within [" + std::to_string(opt.min_fraction) + ", " +
                     std::to_string(opt.max_fraction) + "]");
  }
  return best;
}

}  // namespace catgan::dataset
