#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "catgan/dataset/annotations.hpp"
#include "catgan/dataset/container.hpp"
#include "catgan/dataset/split.hpp"
#include "catgan/dataset/stats.hpp"

namespace catgan::dataset {

/// One video of a build manifest. Paths are relative to the manifest file.
struct VideoSource {
  std::string id;
  std::string identity;
  std::filesystem::path annotations;  // combined AU + VA text file
  std::filesystem::path frames;       // directory of <frame, 6 digits>.png
  std::filesystem::path landmarks;    // lines "frame x1 y1 x2 y2 x3 y3 x4 y4", several per frame allowed
  std::optional<std::filesystem::path> va_source;  // "valence arousal" per line at va_fps
  double va_fps = 30.0;
  std::optional<std::uint64_t> frame_count;  // video length at 30 fps; default last annotated frame + 1
};

struct Manifest {
  std::size_t image_size = 28;
  std::vector<VideoSource> videos;
};

/// Reads the JSON manifest:
///   {"image_size": 28, "videos": [{"id", "identity", "annotations", "frames",
///    "landmarks", "va_source"?: {"path", "fps"}, "frame_count"?}]}
Manifest read_manifest(const std::filesystem::path& path);

/// Annotation records of one video with VA replaced by the resampled source
/// series when the video has one.
std::vector<AnnotationRecord> load_video_records(const VideoSource& video);

/// Frame and AU totals per video from annotations alone.
std::vector<VideoMeta> video_meta(const Manifest& manifest);

struct BuildResult {
  PackedDataset train;
  PackedDataset test;
  SplitResult split;
  StatsReport stats;
  std::vector<std::string> warnings;
};

/// Face selection, cropping and labelling per frame, then an identity-closed
/// split over the kept frames.
BuildResult build_dataset(const Manifest& manifest, const SplitOptions& options, std::size_t histogram_bins = 40);

/// Records view of a packed set (frame = sample index) for statistics.
std::vector<AnnotationRecord> records_of(const PackedDataset& data);

/// JSON rendering of a split with its gap report.
std::string split_json(const SplitResult& split);

}  // namespace catgan::dataset
