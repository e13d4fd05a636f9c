#include <doctest.h>

#include <random>

#include "catgan/image.hpp"
#include "fixtures.hpp"

using namespace catgan;

namespace {

Image noise(std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Image img{w, h, 3, std::vector<std::uint8_t>(w * h * 3)};
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng());
  return img;
}

Image solid(std::size_t w, std::size_t h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image img{w, h, 3, {}};
  for (std::size_t i = 0; i < w * h; ++i) img.pixels.insert(img.pixels.end(), {r, g, b});
  return img;
}

}  // namespace

TEST_CASE("png encoding is deterministic and lossless") {
  const auto img = noise(13, 7, 1);
  const auto a = encode_png(img);
  CHECK(a == encode_png(img));
  CHECK(a.size() > 8);
  CHECK(a[1] == 'P');
  const auto path = catgan::testing::fresh_dir("png") / "n.png";
  write_png(path, img);
  CHECK(catgan::testing::slurp(path) == std::string(a.begin(), a.end()));
  const auto back = read_png(path);
  CHECK(back.width == 13);
  CHECK(back.height == 7);
  CHECK(back.pixels == img.pixels);
}

TEST_CASE("gray png decodes to rgb") {
  Image gray{4, 2, 1, {0, 10, 20, 30, 40, 50, 60, 255}};
  const auto path = catgan::testing::fresh_dir("png_gray") / "g.png";
  write_png(path, gray);
  const auto back = read_png(path);
  REQUIRE(back.channels == 3);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t c = 0; c < 3; ++c) CHECK(back.pixels[i * 3 + c] == gray.pixels[i]);
  }
}

TEST_CASE("reading a non-png fails cleanly") {
  const auto dir = catgan::testing::fresh_dir("png_bad");
  std::ofstream(dir / "x.png") << "not a png";
  CHECK_THROWS_AS(read_png(dir / "x.png"), ImageError);
  CHECK_THROWS_AS(read_png(dir / "missing.png"), ImageError);
}

TEST_CASE("crop_resize keeps solid regions solid and clamps to the edges") {
  auto img = solid(20, 20, 200, 0, 0);
  for (std::size_t y = 0; y < 20; ++y) {
    for (std::size_t x = 10; x < 20; ++x) img.pixels[(y * 20 + x) * 3] = 0;
  }
  const auto left = crop_resize(img, dataset::CropBox{0, 0, 8, 8}, 4);
  CHECK(left.width == 4);
  CHECK(left.height == 4);
  for (std::size_t i = 0; i < 16; ++i) CHECK(left.pixels[i * 3] == 200);
  const auto right = crop_resize(img, dataset::CropBox{14, 14, 30, 30}, 5);
  for (std::size_t i = 0; i < 25; ++i) CHECK(right.pixels[i * 3] == 0);
  const auto same = crop_resize(img, dataset::CropBox{0, 0, 20, 20}, 20);
  CHECK(same.pixels == img.pixels);
}

TEST_CASE("tile places images row-major on black") {
  std::vector<Image> imgs{solid(2, 2, 10, 0, 0), solid(2, 2, 20, 0, 0), solid(2, 2, 30, 0, 0)};
  const auto t = tile(imgs, 2);
  CHECK(t.width == 4);
  CHECK(t.height == 4);
  CHECK(t.at(0, 0, 0) == 10);
  CHECK(t.at(3, 1, 0) == 20);
  CHECK(t.at(1, 3, 0) == 30);
  CHECK(t.at(3, 3, 0) == 0);
}

TEST_CASE("tensor samples map their range onto 0..255") {
  Tensor<double> s({2, 1, 2, 1}, 0.0);
  s[0] = -1.0;
  s[1] = 1.0;
  s[2] = 0.0;
  s[3] = 5.0;
  const auto imgs = tensor_to_images(s, 1, 2, 1, -1.0, 1.0);
  REQUIRE(imgs.size() == 2);
  CHECK(imgs[0].pixels == std::vector<std::uint8_t>{0, 255});
  CHECK(imgs[1].pixels[1] == 255);
  CHECK(std::abs(int(imgs[1].pixels[0]) - 128) <= 1);
}
