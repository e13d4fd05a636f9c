#include "catgan/dataset/container.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "../byte_io.hpp"

namespace catgan::dataset {

namespace {

constexpr char kMagic[4] = {'A', 'F', 'D', 'S'};
using Reader = detail::ByteReader<ContainerError>;

void check_geometry(const PackedDataset& d) {
  for (std::size_t extent : {d.height, d.width, d.channels}) {
    if (extent == 0 || extent > 0xffff) throw ContainerError("image extents must lie in [1, 65535]");
  }
  if (d.pixels.size() != d.labels.size() * d.sample_bytes()) {
    throw ContainerError("container holds " + std::to_string(d.labels.size()) + " labels but " +
                         std::to_string(d.pixels.size()) + " pixel bytes");
  }
}

struct Header {
  std::size_t height, width, channels;
  std::uint64_t count;
};

Header read_header(Reader& r) {
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) r.fail("bad magic");
  const auto version = r.get<std::uint16_t>();
  if (version != kContainerVersion) r.fail("unsupported version " + std::to_string(version));
  Header h{r.get<std::uint16_t>(), r.get<std::uint16_t>(), r.get<std::uint16_t>(), 0};
  h.count = r.get<std::uint64_t>();
  const auto record = r.get<std::uint32_t>();
  if (record != kRecordBytes) r.fail("record size " + std::to_string(record) + ", expected " + std::to_string(kRecordBytes));
  if (h.height == 0 || h.width == 0 || h.channels == 0) r.fail("zero image extent");
  return h;
}

}  // namespace

SampleLabel to_label(const AnnotationRecord& record) {
  return {record.au_presence, record.au_intensity, static_cast<float>(record.valence), static_cast<float>(record.arousal)};
}

std::vector<std::uint8_t> encode_dataset(const PackedDataset& data) {
  check_geometry(data);
  std::vector<std::uint8_t> out;
  out.reserve(kContainerHeaderBytes + data.labels.size() * (data.sample_bytes() + kRecordBytes));
  detail::ByteWriter w(out);
  w.bytes(kMagic, 4);
  w.put(kContainerVersion);
  w.put(static_cast<std::uint16_t>(data.height));
  w.put(static_cast<std::uint16_t>(data.width));
  w.put(static_cast<std::uint16_t>(data.channels));
  w.put(static_cast<std::uint64_t>(data.labels.size()));
  w.put(static_cast<std::uint32_t>(kRecordBytes));
  const std::size_t sb = data.sample_bytes();
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    const auto& l = data.labels[i];
    w.bytes(data.pixels.data() + i * sb, sb);
    w.bytes(l.presence.data(), l.presence.size());
    w.bytes(l.intensity.data(), l.intensity.size());
    w.f32(l.valence);
    w.f32(l.arousal);
  }
  return out;
}

std::uint64_t declared_payload_bytes(const std::vector<std::uint8_t>& header) {
  Reader r(header.data(), header.size(), "dataset container");
  const Header h = read_header(r);
  return h.count * (h.height * h.width * h.channels + kRecordBytes);
}

PackedDataset decode_dataset(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes.data(), bytes.size(), "dataset container");
  const Header h = read_header(r);
  PackedDataset d;
  d.height = h.height;
  d.width = h.width;
  d.channels = h.channels;
  const std::size_t sb = d.sample_bytes();
  if (h.count > r.remaining() / (sb + kRecordBytes)) {
    r.fail("truncated: header declares " + std::to_string(h.count) + " samples but only " +
           std::to_string(r.remaining()) + " payload bytes follow");
  }
  d.pixels.resize(h.count * sb);
  d.labels.resize(h.count);
  for (std::size_t i = 0; i < h.count; ++i) {
    auto& l = d.labels[i];
    r.bytes(d.pixels.data() + i * sb, sb);
    r.bytes(l.presence.data(), l.presence.size());
    r.bytes(l.intensity.data(), l.intensity.size());
    for (std::size_t k = 0; k < l.presence.size(); ++k) {
      if (l.presence[k] > 1) r.fail("presence byte is not 0 or 1");
    }
    l.valence = r.f32();
    l.arousal = r.f32();
    if (!std::isfinite(l.valence) || !std::isfinite(l.arousal)) r.fail("non-finite valence/arousal");
  }
  if (r.remaining() != 0) r.fail(std::to_string(r.remaining()) + " trailing bytes");
  return d;
}

void pack_dataset(const PackedDataset& data, const std::filesystem::path& path) {
  const auto bytes = encode_dataset(data);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ContainerError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ContainerError("failed writing " + path.string());
}

PackedDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContainerError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_dataset(bytes);
  } catch (const ContainerError& e) {
    throw ContainerError(path.string() + ": " + e.what());
  }
}

ImageSet to_image_set(const PackedDataset& data) {
  ImageSet set;
  set.height = data.height;
  set.width = data.width;
  set.channels = data.channels;
  set.pixels = data.pixels;
  for (const auto& l : data.labels) {
    set.labels.au.push_back(l.presence);
    set.labels.valence.push_back(l.valence);
    set.labels.arousal.push_back(l.arousal);
  }
  return set;
}

}  // namespace catgan::dataset
