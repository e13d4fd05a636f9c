#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

namespace catgan::dataset {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Four landmark points of one detected face; the crop box is their bounding box.
struct LandmarkCandidate {
  std::array<Point, 4> points{};

  Point center() const;
};

struct CropBox {
  long left = 0, top = 0;
  long width = 0, height = 0;
};

/// Index of the candidate to keep: with a previous center, the one whose
/// center is nearest (ties to the lowest index); otherwise the first.
/// Throws std::invalid_argument on an empty list.
std::size_t select_face(std::span<const LandmarkCandidate> candidates, std::optional<Point> prev_center);

/// Integer bounding box of the candidate's points, at least 1x1.
CropBox crop_box(const LandmarkCandidate& candidate);

}  // namespace catgan::dataset
