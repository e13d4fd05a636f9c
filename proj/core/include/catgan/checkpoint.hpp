#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "catgan/models.hpp"

namespace catgan {

/// On-disk layout (all integers little-endian):
///   "CGAN" | u16 version | model config | u32 entry count
///   entries: u32 name length, name, u32 rank, u64 extents..., f64 values...
///   u64 iteration | u32 rng text length, rng text
/// Entries hold every generator and discriminator parameter followed by the
/// batch-norm running statistics ("<layer>.running_mean/.running_var").
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct CheckpointEntry {
  std::string name;
  Shape shape;
  std::vector<double> values;

  friend bool operator==(const CheckpointEntry&, const CheckpointEntry&) = default;
};

struct CheckpointRecord {
  ModelConfig config;
  std::vector<CheckpointEntry> entries;
  std::uint64_t iteration = 0;
  std::string rng_state;  // std::mt19937_64 stream representation

  friend bool operator==(const CheckpointRecord&, const CheckpointRecord&) = default;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_checkpoint(const CheckpointRecord& record);
/// Throws CheckpointError naming the byte offset of the first inconsistency.
CheckpointRecord decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void write_checkpoint(const std::filesystem::path& path, const CheckpointRecord& record);
CheckpointRecord read_checkpoint(const std::filesystem::path& path);

template <typename T>
CheckpointRecord snapshot(const GanModel<T>& model, std::uint64_t iteration, const Rng& rng);

/// Rebuilds a model with the stored configuration and values. The RNG state
/// is restored into `rng` when non-null.
template <typename T>
GanModel<T> restore(const CheckpointRecord& record, Rng* rng = nullptr);

/// "ckpt-<iteration, zero padded to 9 digits>.cgan"
std::string checkpoint_filename(std::uint64_t iteration);

}  // namespace catgan
