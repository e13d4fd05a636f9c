#pragma once

// Internal dense kernels shared by the op implementations.

#include <Eigen/Core>
#include <cstddef>

namespace catgan::detail {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
Eigen::Map<RowMatrix<T>> as_matrix(T* data, std::size_t rows, std::size_t cols) {
  return {data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

template <typename T>
Eigen::Map<const RowMatrix<T>> as_matrix(const T* data, std::size_t rows, std::size_t cols) {
  return {data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

/// Layout of one convolution: input [B, H, W, C] -> output [B, OH, OW, F].
struct ConvGeometry {
  std::size_t batch, height, width, channels;
  std::size_t out_height, out_width;
  std::size_t kernel_h, kernel_w;
  std::size_t stride_h, stride_w;
  std::size_t pad_top, pad_left;

  std::size_t patch_size() const { return kernel_h * kernel_w * channels; }
  std::size_t patch_count() const { return batch * out_height * out_width; }
};

/// Unfolds input patches into a [patch_count, patch_size] row-major matrix.
template <typename T>
void im2col(const T* input, const ConvGeometry& geo, T* cols) {
  const std::size_t c = geo.channels;
  T* row = cols;
  for (std::size_t b = 0; b < geo.batch; ++b) {
    const T* image = input + b * geo.height * geo.width * c;
    for (std::size_t oy = 0; oy < geo.out_height; ++oy) {
      for (std::size_t ox = 0; ox < geo.out_width; ++ox) {
        T* dst = row;
        for (std::size_t ky = 0; ky < geo.kernel_h; ++ky) {
          const long iy = static_cast<long>(oy * geo.stride_h + ky) - static_cast<long>(geo.pad_top);
          for (std::size_t kx = 0; kx < geo.kernel_w; ++kx, dst += c) {
            const long ix =
                static_cast<long>(ox * geo.stride_w + kx) - static_cast<long>(geo.pad_left);
            if (iy < 0 || ix < 0 || iy >= static_cast<long>(geo.height) ||
                ix >= static_cast<long>(geo.width)) {
              for (std::size_t k = 0; k < c; ++k) dst[k] = T{0};
            } else {
              const T* src = image + (static_cast<std::size_t>(iy) * geo.width +
                                      static_cast<std::size_t>(ix)) * c;
              for (std::size_t k = 0; k < c; ++k) dst[k] = src[k];
            }
          }
        }
        row += geo.patch_size();
      }
    }
  }
}

/// Adjoint of im2col: scatter-adds patch rows back into an input-shaped buffer.
template <typename T>
void col2im(const T* cols, const ConvGeometry& geo, T* input) {
  const std::size_t c = geo.channels;
  const T* row = cols;
  for (std::size_t b = 0; b < geo.batch; ++b) {
    T* image = input + b * geo.height * geo.width * c;
    for (std::size_t oy = 0; oy < geo.out_height; ++oy) {
      for (std::size_t ox = 0; ox < geo.out_width; ++ox) {
        const T* src = row;
        for (std::size_t ky = 0; ky < geo.kernel_h; ++ky) {
          const long iy = static_cast<long>(oy * geo.stride_h + ky) - static_cast<long>(geo.pad_top);
          for (std::size_t kx = 0; kx < geo.kernel_w; ++kx, src += c) {
            const long ix =
                static_cast<long>(ox * geo.stride_w + kx) - static_cast<long>(geo.pad_left);
            if (iy < 0 || ix < 0 || iy >= static_cast<long>(geo.height) ||
                ix >= static_cast<long>(geo.width)) {
              continue;
            }
            T* dst = image + (static_cast<std::size_t>(iy) * geo.width +
                              static_cast<std::size_t>(ix)) * c;
            for (std::size_t k = 0; k < c; ++k) dst[k] += src[k];
          }
        }
        row += geo.patch_size();
      }
    }
  }
}

}  // namespace catgan::detail
