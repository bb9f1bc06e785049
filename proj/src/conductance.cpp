#include "ttfsim/conductance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ttfsim/errors.hpp"

namespace ttfsim {

int nearest_level_index(const ConductanceLadder& ladder, double magnitude) {
  // Magnitudes are compared against the differences G(k) - G(0), which are
  // strictly increasing.
  const double base = ladder.levels.front();
  int lo = 0;
  int hi = ConductanceLadder::kLevels - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (ladder.levels[mid + 1] - base < magnitude) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  // lo is the first index whose successor difference reaches magnitude;
  // compare lo and lo+1 explicitly.
  int best = lo;
  double best_err = std::abs((ladder.levels[lo] - base) - magnitude);
  if (lo + 1 < ConductanceLadder::kLevels) {
    const double err = std::abs((ladder.levels[lo + 1] - base) - magnitude);
    if (err < best_err) {
      best = lo + 1;
      best_err = err;
    }
  }
  return best;
}

ConductanceNetwork quantize_network(const Network& network, const ConductanceLadder& ladder) {
  network.validate();
  ConductanceNetwork cnet;
  cnet.layer_sizes = network.layer_sizes;
  cnet.ladder = ladder;
  for (std::size_t l = 0; l < network.weights.size(); ++l) {
    const Matrix& w = network.weights[l];
    double max_abs = 0.0;
    for (double v : w.values()) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) {
      throw ConfigError("quantize: layer " + std::to_string(l) +
                        " is all zero; normalization is undefined (train or load weights first)");
    }
    const double scale = max_abs / ladder.max_weight();

    Grid<std::uint8_t> plus(w.rows(), w.cols());
    Grid<std::uint8_t> minus(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < w.cols(); ++j) {
        const double value = w(i, j);
        if (value == 0.0) continue;  // both sides stay at G(0)
        const int k = nearest_level_index(ladder, std::abs(value) / scale);
        if (value > 0.0) {
          plus(i, j) = static_cast<std::uint8_t>(k);
        } else {
          minus(i, j) = static_cast<std::uint8_t>(k);
        }
      }
    }
    cnet.k_plus.push_back(std::move(plus));
    cnet.k_minus.push_back(std::move(minus));
    cnet.scale.push_back(scale);

    auto thresholds = network.thresholds[l];
    for (double& v : thresholds) v /= scale;
    cnet.thresholds.push_back(std::move(thresholds));
  }
  return cnet;
}

namespace {

Network materialize(const ConductanceNetwork& cnet, bool software_scale) {
  Network net;
  net.layer_sizes = cnet.layer_sizes;
  for (std::size_t l = 0; l < cnet.k_plus.size(); ++l) {
    const auto& plus = cnet.k_plus[l];
    const auto& minus = cnet.k_minus[l];
    const double s = software_scale ? cnet.scale[l] : 1.0;
    Matrix w(plus.rows(), plus.cols());
    for (std::size_t i = 0; i < plus.rows(); ++i) {
      for (std::size_t j = 0; j < plus.cols(); ++j) {
        w(i, j) = s * (cnet.ladder.level(plus(i, j)) - cnet.ladder.level(minus(i, j)));
      }
    }
    net.weights.push_back(std::move(w));
    auto thresholds = cnet.thresholds[l];
    if (software_scale) {
      for (double& v : thresholds) v *= cnet.scale[l];
    }
    net.thresholds.push_back(std::move(thresholds));
  }
  return net;
}

}  // namespace

Network effective_weights(const ConductanceNetwork& cnet) { return materialize(cnet, true); }

Network hardware_weights(const ConductanceNetwork& cnet) { return materialize(cnet, false); }

}  // namespace ttfsim
