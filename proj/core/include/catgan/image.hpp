#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "catgan/dataset/faces.hpp"
#include "catgan/tensor.hpp"

namespace catgan {

/// 8-bit interleaved image, 1 (gray) or 3 (RGB) channels.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 3;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::size_t x, std::size_t y, std::size_t c) const { return pixels[(y * width + x) * channels + c]; }
};

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// PNG bytes with fixed encoder settings and no time chunks, so equal
/// images encode to equal bytes.
std::vector<std::uint8_t> encode_png(const Image& image);
void write_png(const std::filesystem::path& path, const Image& image);
/// Decodes any PNG to 8-bit RGB.
Image read_png(const std::filesystem::path& path);

/// Crops `box` (clamped to the image edges) and resamples it bilinearly to size x size.
Image crop_resize(const Image& image, const dataset::CropBox& box, std::size_t size);

/// Lays equally sized images out row-major, `columns` per row, on a black canvas.
Image tile(const std::vector<Image>& images, std::size_t columns);

/// Generator samples [N, H, W, C] (or [N, H*W] for flat gray) in [lo, hi] to images.
template <typename T>
std::vector<Image> tensor_to_images(const Tensor<T>& samples, std::size_t height, std::size_t width,
                                    std::size_t channels, double lo, double hi);

}  // namespace catgan
