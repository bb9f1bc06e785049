#include "ttfsim/network.hpp"

#include <string>

#include "ttfsim/errors.hpp"

namespace ttfsim {

Network Network::with_shape(std::vector<int> sizes, double v_th) {
  Network net;
  net.layer_sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    net.weights.emplace_back(net.layer_sizes[l], net.layer_sizes[l + 1]);
    net.thresholds.emplace_back(net.layer_sizes[l + 1], v_th);
  }
  net.validate();
  return net;
}

void Network::set_uniform_thresholds(double v_th) {
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    thresholds[l].assign(layer_sizes[l + 1], v_th);
  }
}

void Network::validate() const {
  if (layer_sizes.size() < 2) throw ShapeError("network needs at least two layers");
  for (int n : layer_sizes) {
    if (n < 1) throw ShapeError("layer size must be >= 1");
  }
  if (weights.size() != layer_sizes.size() - 1 || thresholds.size() != weights.size()) {
    throw ShapeError("weights/thresholds do not match layer count");
  }
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    if (weights[l].rows() != static_cast<std::size_t>(layer_sizes[l]) ||
        weights[l].cols() != static_cast<std::size_t>(layer_sizes[l + 1])) {
      throw ShapeError("weight matrix " + std::to_string(l) + " does not chain");
    }
    if (thresholds[l].size() != static_cast<std::size_t>(layer_sizes[l + 1])) {
      throw ShapeError("threshold vector " + std::to_string(l) + " does not chain");
    }
    for (double v : thresholds[l]) {
      if (!(v > 0.0)) throw ShapeError("thresholds must be positive");
    }
  }
  if (!alive.empty() && alive.size() != weights.size()) {
    throw ShapeError("alive mask does not match layer count");
  }
}

}  // namespace ttfsim
