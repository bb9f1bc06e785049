#include "ttfsim/dataset.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <utility>

#include "ttfsim/errors.hpp"

namespace ttfsim {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;  // 3-D unsigned byte
constexpr std::uint32_t kLabelMagic = 0x00000801;  // 1-D unsigned byte

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) {
    throw IdxError("truncated header, expected 4 more bytes", offset);
  }
  return (std::uint32_t(bytes[offset]) << 24) | (std::uint32_t(bytes[offset + 1]) << 16) |
         (std::uint32_t(bytes[offset + 2]) << 8) | std::uint32_t(bytes[offset + 3]);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  // Gzip-compressed variants are accepted transparently.
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) {
    return gunzip(bytes);
  }
  return bytes;
}

}  // namespace

std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> bytes) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
    throw IdxError("gzip: inflateInit failed", 0);
  }
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> buf(1 << 16);
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = buf.data();
    zs.avail_out = static_cast<uInt>(buf.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      const auto at = static_cast<std::size_t>(zs.total_in);
      inflateEnd(&zs);
      throw IdxError("gzip: corrupt stream", at);
    }
    out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
  }
  inflateEnd(&zs);
  return out;
}

std::vector<Image> parse_idx_images(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw IdxError("empty file", 0);
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kImageMagic) {
    char msg[64];
    std::snprintf(msg, sizeof msg, "bad image magic 0x%08x", magic);
    throw IdxError(msg, 0);
  }
  const std::size_t count = read_be32(bytes, 4);
  const std::size_t rows = read_be32(bytes, 8);
  const std::size_t cols = read_be32(bytes, 12);
  if (rows == 0 || cols == 0) {
    throw IdxError("zero image dimensions", 8);
  }
  const std::size_t avail = bytes.size() - 16;
  if (rows > SIZE_MAX / cols || (count != 0 && rows * cols > avail / count)) {
    throw IdxError("truncated payload, data ends early", bytes.size());
  }
  std::vector<Image> images(count);
  std::size_t offset = 16;
  for (auto& im : images) {
    im.height = static_cast<int>(rows);
    im.width = static_cast<int>(cols);
    im.pixels.assign(bytes.begin() + offset, bytes.begin() + offset + rows * cols);
    offset += rows * cols;
  }
  return images;
}

std::vector<int> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw IdxError("empty file", 0);
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kLabelMagic) {
    char msg[64];
    std::snprintf(msg, sizeof msg, "bad label magic 0x%08x", magic);
    throw IdxError(msg, 0);
  }
  const std::size_t count = read_be32(bytes, 4);
  if (bytes.size() < 8 + count) {
    throw IdxError("truncated payload, data ends early", bytes.size());
  }
  std::vector<int> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t value = bytes[8 + i];
    if (value > 9) {
      throw IdxError("label out of range [0, 9]: " + std::to_string(int(value)), 8 + i);
    }
    labels[i] = value;
  }
  return labels;
}

std::vector<Image> load_idx_images(const std::string& path) {
  return parse_idx_images(read_file(path));
}

std::vector<int> load_idx_labels(const std::string& path) {
  return parse_idx_labels(read_file(path));
}

LabeledDataset load_dataset(const std::string& image_path, const std::string& label_path) {
  LabeledDataset ds;
  ds.images = load_idx_images(image_path);
  ds.labels = load_idx_labels(label_path);
  if (ds.images.size() != ds.labels.size()) {
    throw ConfigError("image/label count mismatch: " + std::to_string(ds.images.size()) + " vs " +
                      std::to_string(ds.labels.size()));
  }
  return ds;
}

Image crop_center(const Image& image) {
  constexpr int kIn = 28, kOut = 20, kBorder = 4;
  if (image.height != kIn || image.width != kIn) {
    throw ShapeError("crop_center expects a 28x28 image, got " + std::to_string(image.height) +
                     "x" + std::to_string(image.width));
  }
  Image out;
  out.height = kOut;
  out.width = kOut;
  out.pixels.resize(kOut * kOut);
  for (int r = 0; r < kOut; ++r) {
    for (int c = 0; c < kOut; ++c) {
      out.pixels[static_cast<std::size_t>(r) * kOut + c] = image.at(r + kBorder, c + kBorder);
    }
  }
  return out;
}

LabeledDataset crop_dataset(LabeledDataset dataset) {
  for (auto& im : dataset.images) {
    im = crop_center(im);
  }
  return dataset;
}

}  // namespace ttfsim
