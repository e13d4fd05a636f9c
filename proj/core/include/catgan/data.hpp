#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "catgan/graph.hpp"
#include "catgan/metrics.hpp"
#include "catgan/tensor.hpp"

namespace catgan {

/// How 8-bit pixels map to reals.
enum class PixelRange {
  unit,    // p / 255, for sigmoid generators
  signed_  // p / 127.5 - 1, for tanh generators
};

/// An in-memory labelled image collection, HWC 8-bit per sample.
struct ImageSet {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> pixels;
  metrics::LabelBatch labels;  // one entry per image in every populated field

  std::size_t sample_bytes() const { return height * width * channels; }
  std::size_t size() const { return sample_bytes() == 0 ? 0 : pixels.size() / sample_bytes(); }
  /// Throws if label fields and pixel payload disagree on the sample count.
  void validate() const;
};

/// Images [first, first + count) with their labels.
ImageSet slice(const ImageSet& set, std::size_t first, std::size_t count);

/// Reads an IDX3 image file and IDX1 label file, gzip-compressed or plain.
/// Grayscale is replicated to `channels` (1 or 3).
ImageSet load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels,
                    std::size_t channels = 1);

/// Mean pixel over the set after mapping to `range`.
double mean_pixel(const ImageSet& set, PixelRange range);

template <typename T>
struct Batch {
  Tensor<T> images;  // [B, H, W, C], or [B, H*W*C] when flat
  metrics::LabelBatch labels;
};

template <typename T>
Batch<T> gather(const ImageSet& set, std::span<const std::size_t> indices, PixelRange range, bool flat);

/// Endless mini-batch index stream over a seeded permutation per epoch. An
/// epoch's tail shorter than the batch is dropped, so a batch never repeats an index.
class BatchSampler {
 public:
  BatchSampler(std::size_t population, std::uint64_t seed);
  std::vector<std::size_t> next(std::size_t batch);

 private:
  void reshuffle();

  std::size_t population_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

}  // namespace catgan
