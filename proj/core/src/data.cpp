#include "catgan/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

namespace catgan {

void ImageSet::validate() const {
  if (sample_bytes() == 0) {
    if (!pixels.empty()) throw std::invalid_argument("image set has pixels but no geometry");
    return;
  }
  if (pixels.size() % sample_bytes() != 0) {
    throw std::invalid_argument("image payload is not a whole number of samples");
  }
  const std::size_t n = size();
  auto check = [n](std::size_t have, const char* field) {
    if (have != 0 && have != n) {
      throw std::invalid_argument(std::string("image set: ") + field + " has " + std::to_string(have) +
                                  " entries for " + std::to_string(n) + " images");
    }
  };
  check(labels.classes.size(), "classes");
  check(labels.au.size(), "au");
  check(labels.valence.size(), "valence");
  check(labels.arousal.size(), "arousal");
  check(labels.real_flag.size(), "real_flag");
  labels.validate();
}

namespace {

template <typename V>
void copy_range(const std::vector<V>& src, std::vector<V>& dst, std::size_t first, std::size_t count) {
  if (src.empty()) return;
  dst.assign(src.begin() + static_cast<std::ptrdiff_t>(first),
             src.begin() + static_cast<std::ptrdiff_t>(first + count));
}

template <typename V>
void pick(const std::vector<V>& src, std::vector<V>& dst, std::span<const std::size_t> indices) {
  if (src.empty()) return;
  dst.reserve(indices.size());
  for (std::size_t i : indices) dst.push_back(src[i]);
}

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  GzHandle f(gzopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  int n;
  while ((n = gzread(f.get(), buf, sizeof buf)) > 0) out.insert(out.end(), buf, buf + n);
  if (n < 0) throw std::runtime_error("failed reading " + path.string());
  return out;
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

}  // namespace

ImageSet slice(const ImageSet& set, std::size_t first, std::size_t count) {
  if (first + count > set.size()) {
    throw std::out_of_range("slice [" + std::to_string(first) + "," + std::to_string(first + count) +
                            ") of " + std::to_string(set.size()) + " images");
  }
  ImageSet out;
  out.height = set.height;
  out.width = set.width;
  out.channels = set.channels;
  const std::size_t sb = set.sample_bytes();
  out.pixels.assign(set.pixels.begin() + static_cast<std::ptrdiff_t>(first * sb),
                    set.pixels.begin() + static_cast<std::ptrdiff_t>((first + count) * sb));
  copy_range(set.labels.classes, out.labels.classes, first, count);
  copy_range(set.labels.au, out.labels.au, first, count);
  copy_range(set.labels.valence, out.labels.valence, first, count);
  copy_range(set.labels.arousal, out.labels.arousal, first, count);
  copy_range(set.labels.real_flag, out.labels.real_flag, first, count);
  return out;
}

ImageSet load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels,
                    std::size_t channels) {
  if (channels != 1 && channels != 3) throw std::invalid_argument("load_mnist: channels must be 1 or 3");
  const auto img = read_all(images);
  const auto lab = read_all(labels);
  if (img.size() < 16 || be32(img, 0) != 0x00000803) {
    throw std::runtime_error(images.string() + ": not an IDX3 unsigned-byte file");
  }
  if (lab.size() < 8 || be32(lab, 0) != 0x00000801) {
    throw std::runtime_error(labels.string() + ": not an IDX1 unsigned-byte file");
  }
  const std::size_t n = be32(img, 4), h = be32(img, 8), w = be32(img, 12);
  if (img.size() != 16 + n * h * w) throw std::runtime_error(images.string() + ": payload size mismatch");
  if (be32(lab, 4) != n || lab.size() != 8 + n) {
    throw std::runtime_error(labels.string() + ": label count does not match " + std::to_string(n) + " images");
  }
  ImageSet set;
  set.height = h;
  set.width = w;
  set.channels = channels;
  set.pixels.resize(n * h * w * channels);
  for (std::size_t i = 0; i < n * h * w; ++i) {
    for (std::size_t c = 0; c < channels; ++c) set.pixels[i * channels + c] = img[16 + i];
  }
  set.labels.classes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (lab[8 + i] > 9) throw std::runtime_error(labels.string() + ": label outside 0..9");
    set.labels.classes[i] = lab[8 + i];
  }
  return set;
}

double mean_pixel(const ImageSet& set, PixelRange range) {
  if (set.pixels.empty()) throw std::invalid_argument("mean_pixel of an empty set");
  const double raw = std::accumulate(set.pixels.begin(), set.pixels.end(), 0.0) / static_cast<double>(set.pixels.size());
  return range == PixelRange::unit ? raw / 255.0 : raw / 127.5 - 1.0;
}

template <typename T>
Batch<T> gather(const ImageSet& set, std::span<const std::size_t> indices, PixelRange range, bool flat) {
  const std::size_t sb = set.sample_bytes();
  Batch<T> b;
  b.images = flat ? Tensor<T>({indices.size(), sb}) : Tensor<T>({indices.size(), set.height, set.width, set.channels});
  T* dst = b.images.data();
  const T scale = range == PixelRange::unit ? T(1.0 / 255.0) : T(1.0 / 127.5);
  const T shift = range == PixelRange::unit ? T{0} : T{-1};
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= set.size()) throw std::out_of_range("gather: image index out of range");
    const std::uint8_t* src = set.pixels.data() + indices[k] * sb;
    for (std::size_t i = 0; i < sb; ++i) dst[k * sb + i] = static_cast<T>(src[i]) * scale + shift;
  }
  pick(set.labels.classes, b.labels.classes, indices);
  pick(set.labels.au, b.labels.au, indices);
  pick(set.labels.valence, b.labels.valence, indices);
  pick(set.labels.arousal, b.labels.arousal, indices);
  b.labels.real_flag.assign(indices.size(), 0);
  return b;
}

BatchSampler::BatchSampler(std::size_t population, std::uint64_t seed) : population_(population), rng_(seed) {
  if (population == 0) throw std::invalid_argument("BatchSampler: empty population");
  order_.resize(population);
  reshuffle();
}

void BatchSampler::reshuffle() {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

std::vector<std::size_t> BatchSampler::next(std::size_t batch) {
  if (batch == 0 || batch > population_) {
    throw std::invalid_argument("BatchSampler: batch of " + std::to_string(batch) + " from " +
                                std::to_string(population_) + " samples");
  }
  if (cursor_ + batch > population_) reshuffle();
  std::vector<std::size_t> out(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                               order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch));
  cursor_ += batch;
  return out;
}

template Batch<float> gather<float>(const ImageSet&, std::span<const std::size_t>, PixelRange, bool);
template Batch<double> gather<double>(const ImageSet&, std::span<const std::size_t>, PixelRange, bool);

}  // namespace catgan
