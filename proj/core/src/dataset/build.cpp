#include "catgan/dataset/build.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "catgan/dataset/faces.hpp"
#include "catgan/image.hpp"

namespace catgan::dataset {

namespace {

using json = nlohmann::json;

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::map<std::uint64_t, std::vector<LandmarkCandidate>> read_landmarks(const std::filesystem::path& path) {
  auto in = open_text(path);
  std::map<std::uint64_t, std::vector<LandmarkCandidate>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream s(line);
    std::uint64_t frame = 0;
    LandmarkCandidate c;
    s >> frame;
    for (auto& p : c.points) s >> p.x >> p.y;
    std::string extra;
    if (!s || (s >> extra)) throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) + ": expected frame and 8 coordinates");
    out[frame].push_back(c);
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> read_va_series(const std::filesystem::path& path) {
  auto in = open_text(path);
  std::vector<double> v, a;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream s(line);
    double x = 0, y = 0;
    std::string extra;
    if (!(s >> x >> y) || (s >> extra) || x < -1 || x > 1 || y < -1 || y > 1) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) + ": expected valence and arousal in [-1, 1]");
    }
    v.push_back(x);
    a.push_back(y);
  }
  return {v, a};
}

std::filesystem::path frame_path(const VideoSource& video, std::uint64_t frame) {
  char name[32];
  std::snprintf(name, sizeof name, "%06llu.png", static_cast<unsigned long long>(frame));
  return video.frames / name;
}

AuCounts count_aus(const std::vector<AnnotationRecord>& records) {
  AuCounts c{};
  for (const auto& r : records) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += r.au_presence[k];
  }
  return c;
}

void append(PackedDataset& dst, const PackedDataset& src) {
  dst.pixels.insert(dst.pixels.end(), src.pixels.begin(), src.pixels.end());
  dst.labels.insert(dst.labels.end(), src.labels.begin(), src.labels.end());
}

}  // namespace

Manifest read_manifest(const std::filesystem::path& path) {
  auto in = open_text(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  Manifest m;
  try {
    m.image_size = j.value("image_size", std::size_t{28});
    for (const auto& v : j.at("videos")) {
      VideoSource s;
      s.id = v.at("id").get<std::string>();
      s.identity = v.at("identity").get<std::string>();
      s.annotations = base / v.at("annotations").get<std::string>();
      s.frames = base / v.at("frames").get<std::string>();
      s.landmarks = base / v.at("landmarks").get<std::string>();
      if (v.contains("va_source")) {
        s.va_source = base / v["va_source"].at("path").get<std::string>();
        s.va_fps = v["va_source"].at("fps").get<double>();
      }
      if (v.contains("frame_count")) s.frame_count = v["frame_count"].get<std::uint64_t>();
      m.videos.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  if (m.image_size == 0) throw std::runtime_error(path.string() + ": image_size must be positive");
  return m;
}

std::vector<AnnotationRecord> load_video_records(const VideoSource& video) {
  auto in = open_text(video.annotations);
  std::vector<AnnotationRecord> records;
  try {
    records = parse_annotations(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(video.annotations.string() + ": " + e.what());
  }
  if (!video.va_source || records.empty()) return records;
  const std::uint64_t frames = video.frame_count.value_or(records.back().frame + 1);
  const auto [v, a] = read_va_series(*video.va_source);
  if (v.empty()) throw std::runtime_error(video.va_source->string() + ": no values");
  const auto valence = align_lengths(interpolate_va(v, video.va_fps), frames);
  const auto arousal = align_lengths(interpolate_va(a, video.va_fps), frames);
  for (auto& r : records) {
    if (r.frame >= frames) {
      throw std::runtime_error("video " + video.id + ": annotated frame " + std::to_string(r.frame) + " beyond " +
                               std::to_string(frames) + " frames");
    }
    r.valence = valence[r.frame];
    r.arousal = arousal[r.frame];
  }
  return records;
}

std::vector<VideoMeta> video_meta(const Manifest& manifest) {
  std::vector<VideoMeta> out;
  for (const auto& v : manifest.videos) {
    auto in = open_text(v.annotations);
    const auto records = parse_annotations(in);
    out.push_back({v.id, v.identity, records.size(), 30.0, count_aus(records)});
  }
  return out;
}

BuildResult build_dataset(const Manifest& manifest, const SplitOptions& options, std::size_t histogram_bins) {
  BuildResult result;
  std::vector<PackedDataset> per_video;
  std::vector<std::vector<AnnotationRecord>> kept_records;
  std::vector<VideoMeta> metas;
  for (const auto& video : manifest.videos) {
    const auto records = load_video_records(video);
    const auto landmarks = read_landmarks(video.landmarks);
    PackedDataset packed{manifest.image_size, manifest.image_size, 3, {}, {}};
    std::vector<AnnotationRecord> kept;
    std::optional<Point> prev;
    std::size_t dropped = 0;
    for (const auto& r : records) {
      const auto it = landmarks.find(r.frame);
      if (it == landmarks.end()) {
        ++dropped;
        continue;
      }
      const auto& chosen = it->second[select_face(it->second, prev)];
      prev = chosen.center();
      const Image face = crop_resize(read_png(frame_path(video, r.frame)), crop_box(chosen), manifest.image_size);
      packed.pixels.insert(packed.pixels.end(), face.pixels.begin(), face.pixels.end());
      packed.labels.push_back(to_label(r));
      kept.push_back(r);
    }
    if (dropped > 0) {
      result.warnings.push_back("video " + video.id + ": dropped " + std::to_string(dropped) + " annotated frames without a face");
    }
    metas.push_back({video.id, video.identity, kept.size(), 30.0, count_aus(kept)});
    per_video.push_back(std::move(packed));
    kept_records.push_back(std::move(kept));
  }

  result.split = split_dataset(metas, options);
  result.train = result.test = PackedDataset{manifest.image_size, manifest.image_size, 3, {}, {}};
  NamedRecords train{"train", {}}, test{"test", {}};
  for (std::size_t i = 0; i < manifest.videos.size(); ++i) {
    const bool in_train = std::find(result.split.train_ids.begin(), result.split.train_ids.end(), manifest.videos[i].id) !=
                          result.split.train_ids.end();
    append(in_train ? result.train : result.test, per_video[i]);
    auto& side = in_train ? train.records : test.records;
    side.insert(side.end(), kept_records[i].begin(), kept_records[i].end());
  }
  result.stats = compute_stats({train, test}, histogram_bins);
  return result;
}

std::vector<AnnotationRecord> records_of(const PackedDataset& data) {
  std::vector<AnnotationRecord> out;
  out.reserve(data.labels.size());
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    const auto& l = data.labels[i];
    out.push_back({i, l.presence, l.intensity, l.valence, l.arousal});
  }
  return out;
}

std::string split_json(const SplitResult& split) {
  nlohmann::ordered_json j;
  j["train_fraction"] = split.train_fraction;
  j["max_gap"] = split.max_gap;
  j["valid_trials"] = split.valid_trials;
  j["train"] = split.train_ids;
  j["test"] = split.test_ids;
  auto gaps = nlohmann::ordered_json::array();
  for (const auto& g : split.gaps) {
    gaps.push_back({{"au", metrics::kActionUnitIds[g.au_index]},
                    {"train_percent", g.train_pct},
                    {"test_percent", g.test_pct},
                    {"gap", g.gap}});
  }
  j["gaps"] = gaps;
  return j.dump(2);
}

}  // namespace catgan::dataset
