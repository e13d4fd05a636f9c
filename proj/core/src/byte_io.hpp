#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace catgan::detail {

/// Appends little-endian encodings to a byte buffer.
class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  template <typename U>
  void put(U value) {
    static_assert(std::is_unsigned_v<U>);
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void text(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::vector<std::uint8_t>& out_;
};

/// Reads little-endian values; every read past the end throws `Error` with the offset.
template <typename Error>
class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size, std::string what)
      : data_(data), size_(size), what_(std::move(what)) {}

  template <typename U>
  U get() {
    static_assert(std::is_unsigned_v<U>);
    require(sizeof(U));
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(U{data_[pos_ + i]} << (8 * i));
    pos_ += sizeof(U);
    return value;
  }
  float f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  void bytes(void* dst, std::size_t n) {
    require(n);
    std::memcpy(dst, data_ + pos_, n);
    pos_ += n;
  }
  std::string text(std::size_t max_len = 1u << 20) {
    const auto n = get<std::uint32_t>();
    if (n > max_len) fail("string length " + std::to_string(n) + " is implausible");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return size_ - pos_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(what_ + ": " + message + " at byte offset " + std::to_string(pos_));
  }

 private:
  void require(std::size_t n) const {
    if (size_ - pos_ < n) {
      fail("truncated, needs " + std::to_string(n) + " more bytes but " + std::to_string(size_ - pos_) +
           " remain");
    }
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string what_;
};

}  // namespace catgan::detail
