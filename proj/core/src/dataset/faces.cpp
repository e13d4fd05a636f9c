#include "catgan/dataset/faces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace catgan::dataset {

Point LandmarkCandidate::center() const {
  Point c;
  for (const auto& p : points) {
    c.x += p.x;
    c.y += p.y;
  }
  return {c.x / 4.0, c.y / 4.0};
}

std::size_t select_face(std::span<const LandmarkCandidate> candidates, std::optional<Point> prev_center) {
  if (candidates.empty()) throw std::invalid_argument("select_face: no face candidates for this frame");
  if (candidates.size() == 1 || !prev_center) return 0;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Point c = candidates[i].center();
    // Squared distance orders the same as Euclidean distance.
    const double d = (c.x - prev_center->x) * (c.x - prev_center->x) + (c.y - prev_center->y) * (c.y - prev_center->y);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

CropBox crop_box(const LandmarkCandidate& candidate) {
  double x0 = candidate.points[0].x, x1 = x0, y0 = candidate.points[0].y, y1 = y0;
  for (const auto& p : candidate.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("crop_box: non-finite landmark");
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  CropBox box;
  box.left = static_cast<long>(std::floor(x0));
  box.top = static_cast<long>(std::floor(y0));
  box.width = std::max(1L, static_cast<long>(std::ceil(x1)) - box.left);
  box.height = std::max(1L, static_cast<long>(std::ceil(y1)) - box.top);
  return box;
}

}  // namespace catgan::dataset
