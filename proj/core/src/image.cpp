#include "catgan/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>

namespace catgan {

namespace {

void write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_nothing(png_structp) {}

[[noreturn]] void png_error_handler(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  *text = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.channels != 1 && image.channels != 3) throw ImageError("encode_png: 1 or 3 channels supported");
  if (image.width == 0 || image.height == 0 || image.pixels.size() != image.width * image.height * image.channels) {
    throw ImageError("encode_png: pixel buffer does not match the image extents");
  }
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  if (png == nullptr) throw ImageError("encode_png: out of memory");
  png_infop info = png_create_info_struct(png);
  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(image.height);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ImageError("encode_png: " + error);
  }
  png_set_write_fn(png, &out, write_to_vector, flush_nothing);
  png_set_compression_level(png, 9);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  for (std::size_t y = 0; y < image.height; ++y) {
    rows[y] = const_cast<png_bytep>(image.pixels.data() + y * image.width * image.channels);
  }
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageError("failed writing " + path.string());
}

Image read_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "rb"), std::fclose);
  if (!file) throw ImageError("cannot open " + path.string());
  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  if (png == nullptr) throw ImageError("read_png: out of memory");
  png_infop info = png_create_info_struct(png);
  Image image;
  std::vector<png_bytep> rows;
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ImageError(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  // Normalize every PNG flavor to 8-bit RGB.
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  image.width = png_get_image_width(png, info);
  image.height = png_get_image_height(png, info);
  image.channels = 3;
  if (png_get_rowbytes(png, info) != image.width * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ImageError(path.string() + ": unexpected row layout after conversion");
  }
  image.pixels.resize(image.width * image.height * 3);
  rows.resize(image.height);
  for (std::size_t y = 0; y < image.height; ++y) rows[y] = image.pixels.data() + y * image.width * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

Image crop_resize(const Image& image, const dataset::CropBox& box, std::size_t size) {
  if (image.pixels.empty()) throw ImageError("crop_resize: empty image");
  if (size == 0 || box.width <= 0 || box.height <= 0) throw ImageError("crop_resize: empty crop");
  const long left = std::clamp(box.left, 0L, static_cast<long>(image.width) - 1);
  const long top = std::clamp(box.top, 0L, static_cast<long>(image.height) - 1);
  const long right = std::clamp(box.left + box.width, left + 1, static_cast<long>(image.width));
  const long bottom = std::clamp(box.top + box.height, top + 1, static_cast<long>(image.height));
  const double cw = static_cast<double>(right - left), ch = static_cast<double>(bottom - top);

  Image out{size, size, image.channels, std::vector<std::uint8_t>(size * size * image.channels)};
  for (std::size_t y = 0; y < size; ++y) {
    // Pixel centers map onto pixel centers of the crop.
    const double sy = std::clamp((static_cast<double>(y) + 0.5) * ch / static_cast<double>(size) - 0.5, 0.0, ch - 1);
    const auto y0 = static_cast<std::size_t>(sy);
    const std::size_t y1 = std::min(y0 + 1, static_cast<std::size_t>(ch) - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < size; ++x) {
      const double sx = std::clamp((static_cast<double>(x) + 0.5) * cw / static_cast<double>(size) - 0.5, 0.0, cw - 1);
      const auto x0 = static_cast<std::size_t>(sx);
      const std::size_t x1 = std::min(x0 + 1, static_cast<std::size_t>(cw) - 1);
      const double fx = sx - static_cast<double>(x0);
      for (std::size_t c = 0; c < image.channels; ++c) {
        auto px = [&](std::size_t xx, std::size_t yy) {
          return static_cast<double>(image.at(static_cast<std::size_t>(left) + xx, static_cast<std::size_t>(top) + yy, c));
        };
        const double v = (1 - fy) * ((1 - fx) * px(x0, y0) + fx * px(x1, y0)) + fy * ((1 - fx) * px(x0, y1) + fx * px(x1, y1));
        out.pixels[(y * size + x) * image.channels + c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return out;
}

Image tile(const std::vector<Image>& images, std::size_t columns) {
  if (images.empty() || columns == 0) throw ImageError("tile: nothing to lay out");
  const auto& first = images.front();
  for (const auto& im : images) {
    if (im.width != first.width || im.height != first.height || im.channels != first.channels) {
      throw ImageError("tile: images differ in size");
    }
  }
  const std::size_t cols = std::min(columns, images.size());
  const std::size_t rows = (images.size() + columns - 1) / columns;
  Image out{cols * first.width, rows * first.height, first.channels, {}};
  out.pixels.assign(out.width * out.height * out.channels, 0);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::size_t ox = (i % columns) * first.width, oy = (i / columns) * first.height;
    for (std::size_t y = 0; y < first.height; ++y) {
      std::copy_n(images[i].pixels.data() + y * first.width * first.channels, first.width * first.channels,
                  out.pixels.data() + ((oy + y) * out.width + ox) * out.channels);
    }
  }
  return out;
}

template <typename T>
std::vector<Image> tensor_to_images(const Tensor<T>& samples, std::size_t height, std::size_t width,
                                    std::size_t channels, double lo, double hi) {
  const std::size_t per = height * width * channels;
  if (samples.rank() == 0 || per == 0 || samples.size() != samples.extent(0) * per) {
    throw ImageError("tensor_to_images: samples of shape " + to_string(samples.shape()) + " are not " +
                     std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(channels));
  }
  if (!(hi > lo)) throw ImageError("tensor_to_images: empty value range");
  std::vector<Image> out;
  for (std::size_t n = 0; n < samples.extent(0); ++n) {
    Image im{width, height, channels, std::vector<std::uint8_t>(per)};
    for (std::size_t i = 0; i < per; ++i) {
      const double unit = std::clamp((static_cast<double>(samples[n * per + i]) - lo) / (hi - lo), 0.0, 1.0);
      im.pixels[i] = static_cast<std::uint8_t>(std::lround(unit * 255.0));
    }
    out.push_back(std::move(im));
  }
  return out;
}

template std::vector<Image> tensor_to_images<float>(const Tensor<float>&, std::size_t, std::size_t, std::size_t, double, double);
template std::vector<Image> tensor_to_images<double>(const Tensor<double>&, std::size_t, std::size_t, std::size_t, double, double);

}  // namespace catgan
