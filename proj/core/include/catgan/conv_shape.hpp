#pragma once

#include <cstddef>
#include <string>

#include "catgan/tensor.hpp"

namespace catgan {

enum class Padding { same, valid };

/// Zero padding placed before/after one spatial axis. SAME puts the odd
/// extra element after (bottom/right).
struct PadAmount {
  std::size_t before = 0;
  std::size_t after = 0;
};

/// Spatial extent of a convolution output.
/// SAME: ceil(in / stride). VALID: floor((in - k) / stride) + 1, error if k > in.
inline std::size_t conv_output_extent(std::size_t in, std::size_t kernel, std::size_t stride,
                                      Padding padding) {
  if (in == 0 || kernel == 0 || stride == 0) throw ShapeError("conv extents must be positive");
  if (padding == Padding::same) return (in + stride - 1) / stride;
  if (kernel > in) {
    throw ShapeError("VALID convolution with kernel " + std::to_string(kernel) +
                     " larger than input " + std::to_string(in));
  }
  return (in - kernel) / stride + 1;
}

/// Spatial extent of a transposed convolution output.
/// SAME: in * stride. VALID: (in - 1) * stride + kernel.
inline std::size_t conv_transpose_output_extent(std::size_t in, std::size_t kernel,
                                                std::size_t stride, Padding padding) {
  if (in == 0 || kernel == 0 || stride == 0) throw ShapeError("conv extents must be positive");
  if (padding == Padding::same) return in * stride;
  return (in - 1) * stride + kernel;
}

/// Padding a convolution from `in` to `out` needs along one axis.
inline PadAmount conv_padding(std::size_t in, std::size_t out, std::size_t kernel,
                              std::size_t stride, Padding padding) {
  if (padding == Padding::valid) return {};
  const std::size_t needed = (out - 1) * stride + kernel;
  const std::size_t total = needed > in ? needed - in : 0;
  return {total / 2, total - total / 2};
}

}  // namespace catgan
