#pragma once

#include <cstdint>
#include <vector>

#include "ttfsim/dataset.hpp"
#include "ttfsim/encoding.hpp"
#include "ttfsim/network.hpp"
#include "ttfsim/rng.hpp"

namespace ttfsim::test {

inline Image make_image(int height, int width, std::vector<std::uint8_t> pixels) {
  Image im;
  im.height = height;
  im.width = width;
  im.pixels = std::move(pixels);
  return im;
}

inline Image constant_image(int height, int width, std::uint8_t value) {
  return make_image(height, width, std::vector<std::uint8_t>(height * width, value));
}

inline void push_be32(std::vector<std::uint8_t>& bytes, std::uint32_t v) {
  bytes.push_back(static_cast<std::uint8_t>(v >> 24));
  bytes.push_back(static_cast<std::uint8_t>(v >> 16));
  bytes.push_back(static_cast<std::uint8_t>(v >> 8));
  bytes.push_back(static_cast<std::uint8_t>(v));
}

inline std::vector<std::uint8_t> idx_image_bytes(const std::vector<Image>& images) {
  std::vector<std::uint8_t> bytes;
  push_be32(bytes, 0x00000803);
  push_be32(bytes, static_cast<std::uint32_t>(images.size()));
  push_be32(bytes, images.empty() ? 0 : images.front().height);
  push_be32(bytes, images.empty() ? 0 : images.front().width);
  for (const auto& im : images) {
    bytes.insert(bytes.end(), im.pixels.begin(), im.pixels.end());
  }
  return bytes;
}

inline std::vector<std::uint8_t> idx_label_bytes(const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> bytes;
  push_be32(bytes, 0x00000801);
  push_be32(bytes, static_cast<std::uint32_t>(labels.size()));
  bytes.insert(bytes.end(), labels.begin(), labels.end());
  return bytes;
}

/// Network with weights uniform in [lo, hi] and a shared threshold.
inline Network random_network(const std::vector<int>& sizes, double v_th, double lo, double hi,
                              Rng& rng) {
  Network net = Network::with_shape(sizes, v_th);
  for (auto& layer : net.weights) {
    for (double& w : layer.values()) {
      w = lo + (hi - lo) * rng.uniform();
    }
  }
  return net;
}

/// TTFS schedule with uniformly random firing times in [0, t_max].
inline SpikeSchedule random_ttfs_schedule(int neurons, int t_max, Rng& rng) {
  SpikeSchedule s;
  s.mode = EncodingMode::ttfs;
  s.total_steps = t_max;
  s.ttfs_times.resize(neurons);
  for (auto& t : s.ttfs_times) {
    t = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(t_max) + 1));
  }
  return s;
}

}  // namespace ttfsim::test
