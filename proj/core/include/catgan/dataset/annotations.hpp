#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <stdexcept>
#include <vector>

#include "catgan/metrics.hpp"

namespace catgan::dataset {

/// Per-frame labels: for each tracked AU a presence flag and an intensity,
/// plus valence and arousal. Intensity > 0 iff the AU is present.
struct AnnotationRecord {
  std::uint64_t frame = 0;
  metrics::AuFlags au_presence{};
  std::array<std::uint8_t, metrics::kActionUnits> au_intensity{};
  double valence = 0.0;
  double arousal = 0.0;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Reads "frame (presence intensity)x8 valence arousal" lines. Blank lines and
/// lines starting with '#' are skipped. Records come back in ascending frame order.
std::vector<AnnotationRecord> parse_annotations(std::istream& in);

/// Linear resampling of a series sampled at src_fps onto the dst_fps grid of
/// the same clock: output j is the value at time j / dst_fps. The grid stops at
/// the last input time, so the first sample is kept exactly and the last one
/// whenever it falls on the grid. A single value is repeated round(dst / src) times.
std::vector<double> interpolate_va(const std::vector<double>& values, double src_fps, double dst_fps = 30.0);

/// Crops from the end or repeats the last value so the series has target_len
/// entries. Throws when the lengths differ by more than two.
std::vector<double> align_lengths(const std::vector<double>& va, std::size_t target_len);

}  // namespace catgan::dataset
