#pragma once

// Synthetic labelled image sets for harness tests.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "catgan/data.hpp"
#include "catgan/image.hpp"
#include "catgan/models.hpp"

namespace catgan::testing {

/// Random pixels with every label field the head needs.
inline ImageSet synthetic_set(const HeadVariant& head, std::size_t n, std::size_t size, std::size_t channels,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ImageSet set;
  set.height = set.width = size;
  set.channels = channels;
  set.pixels.resize(n * size * size * channels);
  for (auto& p : set.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
  std::uniform_real_distribution<double> va(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (head.kind == HeadKind::softmax) set.labels.classes.push_back(rng() % head.classes);
    if (head.has_au()) {
      metrics::AuFlags f{};
      for (auto& b : f) b = rng() % 2;
      set.labels.au.push_back(f);
    }
    if (head.has_va()) {
      set.labels.valence.push_back(va(rng));
      set.labels.arousal.push_back(va(rng));
    }
  }
  return set;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "catgan_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct ManifestFixture {
  std::filesystem::path manifest;
  std::size_t videos = 0;
  std::size_t frames_per_video = 0;
  std::size_t dropped_frames = 0;  // annotated frames without landmarks
};

/// Writes a complete build manifest: each 24x24 frame shows a red face that
/// drifts right by one pixel per frame and, from frame 1 on, a blue decoy in
/// the opposite corner. Both get a landmark line; frame 0 lists only the face,
/// so nearest-center tracking must keep picking red. Videos 2k and 2k+1 share
/// an identity. Video 0 loses the landmarks of its last frame.
inline ManifestFixture write_manifest_fixture(const std::filesystem::path& dir, std::size_t videos,
                                              std::size_t frames, std::uint64_t seed, std::size_t image_size = 8) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> va(-1.0, 1.0);
  std::filesystem::create_directories(dir);
  std::string json = "{\"image_size\": " + std::to_string(image_size) + ", \"videos\": [";
  for (std::size_t v = 0; v < videos; ++v) {
    const std::string id = "v" + std::to_string(v);
    const auto frame_dir = dir / id;
    std::filesystem::create_directories(frame_dir);
    std::ofstream ann(dir / (id + ".txt"));
    std::ofstream lm(dir / (id + ".landmarks"));
    ann << "# frame, 8 x (presence intensity), valence, arousal\n";
    for (std::size_t f = 0; f < frames; ++f) {
      Image img{24, 24, 3, std::vector<std::uint8_t>(24 * 24 * 3, 0)};
      const std::size_t fx = 2 + f, fy = 2;
      for (std::size_t y = fy; y < fy + 8; ++y) {
        for (std::size_t x = fx; x < fx + 8; ++x) img.pixels[(y * 24 + x) * 3] = 250;
      }
      if (f > 0) {
        for (std::size_t y = 14; y < 22; ++y) {
          for (std::size_t x = 14; x < 22; ++x) img.pixels[(y * 24 + x) * 3 + 2] = 250;
        }
      }
      char name[32];
      std::snprintf(name, sizeof name, "%06zu.png", f);
      write_png(frame_dir / name, img);

      const bool drop = v == 0 && f + 1 == frames;
      if (!drop) {
        if (f > 0) lm << f << " 14 14 22 14 22 22 14 22\n";
        lm << f << ' ' << fx << ' ' << fy << ' ' << fx + 8 << ' ' << fy << ' ' << fx + 8 << ' ' << fy + 8 << ' ' << fx
           << ' ' << fy + 8 << '\n';
      }
      ann << f;
      for (std::size_t a = 0; a < metrics::kActionUnits; ++a) {
        const bool present = (rng() % 4) == 0;
        ann << ' ' << present << ' ' << present;
      }
      ann << ' ' << va(rng) << ' ' << va(rng) << '\n';
    }
    json += std::string(v ? ", " : "") + "{\"id\": \"" + id + "\", \"identity\": \"p" + std::to_string(v / 2) +
            "\", \"annotations\": \"" + id + ".txt\", \"frames\": \"" + id + "\", \"landmarks\": \"" + id +
            ".landmarks\"}";
  }
  json += "]}\n";
  std::ofstream(dir / "manifest.json") << json;
  return {dir / "manifest.json", videos, frames, 1};
}

}  // namespace catgan::testing
