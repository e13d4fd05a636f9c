#include "catgan/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "byte_io.hpp"

namespace catgan {

namespace {

constexpr char kMagic[4] = {'C', 'G', 'A', 'N'};
constexpr std::uint32_t kMaxRank = 8;

using Reader = detail::ByteReader<CheckpointError>;

void put_config(detail::ByteWriter& w, const ModelConfig& c) {
  w.put(static_cast<std::uint8_t>(c.head.kind));
  w.put(static_cast<std::uint32_t>(c.head.classes));
  w.put(static_cast<std::uint8_t>(c.head.va_loss));
  w.put(static_cast<std::uint8_t>(c.head.weighting));
  w.put(static_cast<std::uint32_t>(c.image_size));
  w.put(static_cast<std::uint32_t>(c.channels));
  w.put(static_cast<std::uint32_t>(c.noise_dim));
  w.f64(c.alpha);
  w.put(static_cast<std::uint8_t>(c.flatten_features));
  w.f64(c.leaky.linear);
  w.f64(c.leaky.absolute);
}

ModelConfig get_config(Reader& r) {
  ModelConfig c;
  const auto kind = r.get<std::uint8_t>();
  if (kind > static_cast<std::uint8_t>(HeadKind::joint)) r.fail("unknown head kind " + std::to_string(kind));
  c.head.kind = static_cast<HeadKind>(kind);
  c.head.classes = r.get<std::uint32_t>();
  const auto va = r.get<std::uint8_t>();
  const auto weighting = r.get<std::uint8_t>();
  if (va > 1 || weighting > 1) r.fail("unknown head option");
  c.head.va_loss = static_cast<VaLoss>(va);
  c.head.weighting = static_cast<JointWeighting>(weighting);
  c.image_size = r.get<std::uint32_t>();
  c.channels = r.get<std::uint32_t>();
  c.noise_dim = r.get<std::uint32_t>();
  c.alpha = r.f64();
  c.flatten_features = r.get<std::uint8_t>() != 0;
  c.leaky.linear = r.f64();
  c.leaky.absolute = r.f64();
  return c;
}

template <typename T>
void add_network(std::vector<CheckpointEntry>& out, const Network<T>& net) {
  for (const auto& p : net.parameters()) {
    out.push_back({p.name, p.value.shape(), std::vector<double>(p.value.values().begin(), p.value.values().end())});
  }
  for (const auto& s : net.running_stats()) {
    const auto& m = s.stats.mean;
    const auto& v = s.stats.var;
    out.push_back({s.name + ".running_mean", m.shape(), std::vector<double>(m.values().begin(), m.values().end())});
    out.push_back({s.name + ".running_var", v.shape(), std::vector<double>(v.values().begin(), v.values().end())});
  }
}

template <typename T>
void load_tensor(Tensor<T>& dst, const CheckpointEntry& e) {
  if (e.shape != dst.shape()) {
    throw CheckpointError("checkpoint entry '" + e.name + "' has shape " + to_string(e.shape) +
                          ", model expects " + to_string(dst.shape()));
  }
  for (std::size_t i = 0; i < e.values.size(); ++i) dst[i] = static_cast<T>(e.values[i]);
}

template <typename T>
std::size_t load_network(Network<T>& net, const std::vector<CheckpointEntry>& entries, std::size_t pos) {
  auto next = [&](const std::string& name) -> const CheckpointEntry& {
    if (pos >= entries.size() || entries[pos].name != name) {
      throw CheckpointError("checkpoint is missing entry '" + name + "'");
    }
    return entries[pos++];
  };
  for (auto& p : net.parameters()) load_tensor(p.value, next(p.name));
  for (auto& s : net.running_stats()) {
    load_tensor(s.stats.mean, next(s.name + ".running_mean"));
    load_tensor(s.stats.var, next(s.name + ".running_var"));
  }
  return pos;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const CheckpointRecord& record) {
  std::vector<std::uint8_t> out;
  detail::ByteWriter w(out);
  w.bytes(kMagic, 4);
  w.put(kCheckpointVersion);
  put_config(w, record.config);
  w.put(static_cast<std::uint32_t>(record.entries.size()));
  for (const auto& e : record.entries) {
    if (element_count(e.shape) != e.values.size()) {
      throw CheckpointError("entry '" + e.name + "' shape does not match its value count");
    }
    w.text(e.name);
    w.put(static_cast<std::uint32_t>(e.shape.size()));
    for (std::size_t extent : e.shape) w.put(static_cast<std::uint64_t>(extent));
    for (double v : e.values) w.f64(v);
  }
  w.put(record.iteration);
  w.text(record.rng_state);
  return out;
}

CheckpointRecord decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes.data(), bytes.size(), "checkpoint");
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) r.fail("bad magic");
  const auto version = r.get<std::uint16_t>();
  if (version != kCheckpointVersion) r.fail("unsupported version " + std::to_string(version));
  CheckpointRecord rec;
  rec.config = get_config(r);
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    e.name = r.text(4096);
    const auto rank = r.get<std::uint32_t>();
    if (rank > kMaxRank) r.fail("entry '" + e.name + "' has rank " + std::to_string(rank));
    std::uint64_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      const auto extent = r.get<std::uint64_t>();
      if (extent == 0 || extent > r.remaining()) r.fail("entry '" + e.name + "' has an implausible extent");
      e.shape.push_back(extent);
      n *= extent;
    }
    if (n > r.remaining() / 8) r.fail("entry '" + e.name + "' is truncated");
    e.values.resize(n);
    for (auto& v : e.values) v = r.f64();
    rec.entries.push_back(std::move(e));
  }
  rec.iteration = r.get<std::uint64_t>();
  rec.rng_state = r.text();
  if (r.remaining() != 0) r.fail(std::to_string(r.remaining()) + " trailing bytes");
  return rec;
}

void write_checkpoint(const std::filesystem::path& path, const CheckpointRecord& record) {
  const auto bytes = encode_checkpoint(record);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CheckpointRecord read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

template <typename T>
CheckpointRecord snapshot(const GanModel<T>& model, std::uint64_t iteration, const Rng& rng) {
  CheckpointRecord rec;
  rec.config = model.config;
  add_network(rec.entries, model.generator);
  add_network(rec.entries, model.discriminator);
  rec.iteration = iteration;
  std::ostringstream state;
  state << rng;
  rec.rng_state = state.str();
  return rec;
}

template <typename T>
GanModel<T> restore(const CheckpointRecord& record, Rng* rng) {
  Rng scratch(0);
  GanModel<T> model = build_model<T>(record.config, scratch);
  std::size_t pos = load_network(model.generator, record.entries, 0);
  pos = load_network(model.discriminator, record.entries, pos);
  if (pos != record.entries.size()) {
    throw CheckpointError("checkpoint has " + std::to_string(record.entries.size() - pos) + " unexpected entries");
  }
  if (rng != nullptr) {
    std::istringstream state(record.rng_state);
    state >> *rng;
    if (!state) throw CheckpointError("checkpoint RNG state is unreadable");
  }
  return model;
}

std::string checkpoint_filename(std::uint64_t iteration) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "ckpt-%09llu.cgan", static_cast<unsigned long long>(iteration));
  return buf;
}

template CheckpointRecord snapshot<float>(const GanModel<float>&, std::uint64_t, const Rng&);
template CheckpointRecord snapshot<double>(const GanModel<double>&, std::uint64_t, const Rng&);
template GanModel<float> restore<float>(const CheckpointRecord&, Rng*);
template GanModel<double> restore<double>(const CheckpointRecord&, Rng*);

}  // namespace catgan
