#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <numeric>

#include "helpers.hpp"
#include "ttfsim/dataset.hpp"
#include "ttfsim/errors.hpp"

using namespace ttfsim;
using namespace ttfsim::test;

namespace {

std::vector<std::uint8_t> gzip_compress(const std::vector<std::uint8_t>& bytes) {
  z_stream zs{};
  REQUIRE(deflateInit2(&zs, Z_BEST_SPEED, Z_DEFLATED, 16 + MAX_WBITS, 8,
                       Z_DEFAULT_STRATEGY) == Z_OK);
  std::vector<std::uint8_t> out(compressBound(static_cast<uLong>(bytes.size())) + 64);
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  REQUIRE(deflate(&zs, Z_FINISH) == Z_STREAM_END);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

std::string write_temp(const std::vector<std::uint8_t>& bytes, const char* name) {
  std::string path = std::string("ttfsim_test_") + name;
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return path;
}

}  // namespace

TEST_CASE("image parse reads counts from the header") {
  std::vector<Image> images = {constant_image(3, 2, 7), constant_image(3, 2, 9)};
  auto parsed = parse_idx_images(idx_image_bytes(images));
  CHECK(parsed.size() == 2);
  CHECK(parsed[0].height == 3);
  CHECK(parsed[0].width == 2);
  CHECK(parsed[1].pixels == images[1].pixels);
}

TEST_CASE("image parse errors carry byte offsets") {
  CHECK_THROWS_AS(parse_idx_images({}), IdxError);
  try {
    parse_idx_images({});
  } catch (const IdxError& e) {
    CHECK(e.offset == 0);
  }

  // Correct magic but payload shorter than count*rows*cols.
  auto bytes = idx_image_bytes({constant_image(4, 4, 1)});
  bytes.resize(bytes.size() - 3);
  try {
    parse_idx_images(bytes);
    FAIL("expected IdxError");
  } catch (const IdxError& e) {
    CHECK(e.offset == bytes.size());
  }

  // Label magic in an image file.
  auto labels = idx_label_bytes({1, 2});
  CHECK_THROWS_AS(parse_idx_images(labels), IdxError);
}

TEST_CASE("label parse validates range and accepts zero-count files") {
  auto parsed = parse_idx_labels(idx_label_bytes({0, 5, 9}));
  CHECK(parsed == std::vector<int>{0, 5, 9});

  CHECK_THROWS_AS(parse_idx_labels(idx_label_bytes({3, 10})), IdxError);
  CHECK(parse_idx_labels(idx_label_bytes({})).empty());
}

TEST_CASE("gzip round trip through the file loaders") {
  std::vector<Image> images = {constant_image(2, 2, 3)};
  const auto raw = idx_image_bytes(images);
  const auto path = write_temp(gzip_compress(raw), "images.gz");
  auto loaded = load_idx_images(path);
  CHECK(loaded.size() == 1);
  CHECK(loaded[0].pixels == images[0].pixels);
  std::remove(path.c_str());
}

TEST_CASE("corrupt gzip streams are rejected") {
  auto bytes = gzip_compress(idx_image_bytes({constant_image(4, 4, 9)}));
  bytes.resize(bytes.size() / 2);  // truncate mid-stream
  CHECK_THROWS_AS(gunzip(bytes), IdxError);
  bytes[10] ^= 0xff;
  CHECK_THROWS_AS(gunzip(bytes), IdxError);
}

TEST_CASE("dataset load aligns images and labels") {
  const auto ipath = write_temp(idx_image_bytes({constant_image(2, 2, 1)}), "pair_images");
  const auto lpath = write_temp(idx_label_bytes({4}), "pair_labels");
  auto ds = load_dataset(ipath, lpath);
  CHECK(ds.size() == 1);
  CHECK(ds.labels[0] == 4);

  const auto lpath2 = write_temp(idx_label_bytes({4, 5}), "pair_labels2");
  CHECK_THROWS_AS(load_dataset(ipath, lpath2), ConfigError);
  std::remove(ipath.c_str());
  std::remove(lpath.c_str());
  std::remove(lpath2.c_str());
}

TEST_CASE("crop_center keeps the central window") {
  SUBCASE("all zero stays all zero") {
    auto out = crop_center(constant_image(28, 28, 0));
    CHECK(out.height == 20);
    CHECK(out.width == 20);
    CHECK(std::accumulate(out.pixels.begin(), out.pixels.end(), 0) == 0);
  }
  SUBCASE("pixel at (4,4) lands at (0,0)") {
    auto im = constant_image(28, 28, 0);
    im.pixels[4 * 28 + 4] = 200;
    auto out = crop_center(im);
    CHECK(out.at(0, 0) == 200);
    CHECK(std::accumulate(out.pixels.begin(), out.pixels.end(), 0) == 200);
  }
  SUBCASE("border pixel is removed") {
    auto im = constant_image(28, 28, 0);
    im.pixels[0] = 255;
    auto out = crop_center(im);
    CHECK(std::accumulate(out.pixels.begin(), out.pixels.end(), 0) == 0);
  }
  SUBCASE("wrong shape raises") {
    CHECK_THROWS_AS(crop_center(constant_image(20, 20, 0)), ShapeError);
  }
}

TEST_CASE("crop_center is a projection of the input") {
  Rng rng(99);
  auto im = constant_image(28, 28, 0);
  for (auto& p : im.pixels) p = static_cast<std::uint8_t>(rng.uniform_index(256));
  auto out = crop_center(im);
  long in_sum = std::accumulate(im.pixels.begin(), im.pixels.end(), 0L);
  long out_sum = std::accumulate(out.pixels.begin(), out.pixels.end(), 0L);
  CHECK(out_sum <= in_sum);
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 20; ++c) {
      CHECK(out.at(r, c) == im.at(r + 4, c + 4));
    }
  }
}
