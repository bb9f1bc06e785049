#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ttfsim {

/// Full-scale pixel intensity for byte-valued image data. Encoders take it
/// as a parameter so other intensity ranges can be plugged in.
inline constexpr int kDefaultMaxIntensity = 255;

struct Image {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * width + c]; }
  std::size_t size() const { return pixels.size(); }
};

struct LabeledDataset {
  std::vector<Image> images;
  std::vector<int> labels;

  std::size_t size() const { return images.size(); }
};

/// Parses an IDX 3-D unsigned-byte container (magic 0x00000803). Gzip input
/// is inflated first. Malformed input raises IdxError with the offending
/// byte offset.
std::vector<Image> load_idx_images(const std::string& path);
std::vector<Image> parse_idx_images(std::span<const std::uint8_t> bytes);

/// Parses an IDX 1-D unsigned-byte container (magic 0x00000801) of class
/// labels in [0, 9].
std::vector<int> load_idx_labels(const std::string& path);
std::vector<int> parse_idx_labels(std::span<const std::uint8_t> bytes);

/// Loads an image/label pair and checks that the two files align.
LabeledDataset load_dataset(const std::string& image_path, const std::string& label_path);

/// Central 20x20 window of a 28x28 image (rows 4..23, cols 4..23); pixel
/// values are copied unchanged.
Image crop_center(const Image& image);

/// crop_center applied to every image of a dataset.
LabeledDataset crop_dataset(LabeledDataset dataset);

/// Inflates a gzip stream (used by the loaders; exposed for tests).
std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> bytes);

}  // namespace ttfsim
