#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "catgan/data.hpp"
#include "catgan/dataset/annotations.hpp"

namespace catgan::dataset {

inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderBytes = 24;
inline constexpr std::size_t kRecordBytes = 2 * metrics::kActionUnits + 2 * sizeof(float);

/// Labels as stored per sample.
struct SampleLabel {
  metrics::AuFlags presence{};
  std::array<std::uint8_t, metrics::kActionUnits> intensity{};
  float valence = 0.0f;
  float arousal = 0.0f;

  friend bool operator==(const SampleLabel&, const SampleLabel&) = default;
};

SampleLabel to_label(const AnnotationRecord& record);

struct PackedDataset {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> pixels;  // HWC per sample
  std::vector<SampleLabel> labels;

  std::size_t sample_bytes() const { return height * width * channels; }
  friend bool operator==(const PackedDataset&, const PackedDataset&) = default;
};

class ContainerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header: "AFDS", u16 version, u16 height, u16 width, u16 channels, u64 count,
/// u32 record bytes. Then per sample the image bytes, 8 presence bytes,
/// 8 intensity bytes, f32 valence, f32 arousal. Little-endian throughout.
std::vector<std::uint8_t> encode_dataset(const PackedDataset& data);
PackedDataset decode_dataset(const std::vector<std::uint8_t>& bytes);

/// Payload size the header declares: count * (H*W*C + record bytes).
std::uint64_t declared_payload_bytes(const std::vector<std::uint8_t>& header);

void pack_dataset(const PackedDataset& data, const std::filesystem::path& path);
PackedDataset read_dataset(const std::filesystem::path& path);

/// Training view: AU presence, valence and arousal labels.
ImageSet to_image_set(const PackedDataset& data);

}  // namespace catgan::dataset
