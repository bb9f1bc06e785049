#include "ttfsim/variation.hpp"

#include <algorithm>
#include <cmath>

#include "ttfsim/errors.hpp"

namespace ttfsim {
namespace {

void check_ratio(double r, const char* name) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1]");
  }
}

std::size_t scaled_count(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
}

}  // namespace

void VariationSpec::validate() const {
  if (!(sigma_weight >= 0.0)) throw ConfigError("sigma_weight must be >= 0");
  if (!(sigma_th >= 0.0)) throw ConfigError("sigma_th must be >= 0");
  check_ratio(r_synapse, "r_synapse");
  check_ratio(r_neuron, "r_neuron");
}

void apply_device_variation(Network& network, double sigma_weight, Rng& rng) {
  if (sigma_weight == 0.0) return;
  for (auto& layer : network.weights) {
    for (double& w : layer.values()) {
      if (w != 0.0) {
        w *= rng.normal(1.0, sigma_weight);
      } else {
        w = rng.normal(0.0, sigma_weight);
      }
    }
  }
}

void apply_threshold_variation(std::vector<double>& thresholds, double sigma_th, Rng& rng) {
  if (sigma_th == 0.0) return;
  for (double& v : thresholds) {
    v = std::max(v * rng.normal(1.0, sigma_th), 0.0);
  }
}

void apply_threshold_variation(Network& network, double sigma_th, Rng& rng) {
  if (sigma_th == 0.0) return;
  for (auto& layer : network.thresholds) {
    apply_threshold_variation(layer, sigma_th, rng);
  }
}

void apply_stuck_at_off(Network& network, double r_synapse, double r_neuron, Rng& rng) {
  check_ratio(r_synapse, "r_synapse");
  check_ratio(r_neuron, "r_neuron");

  if (r_synapse > 0.0) {
    // Two devices per synapse; only the loaded side carries the weight, so
    // killing the unloaded one changes nothing.
    std::size_t n_synapses = 0;
    for (const auto& layer : network.weights) n_synapses += layer.size();
    const std::size_t n_devices = 2 * n_synapses;
    for (std::size_t device : sample_without_replacement(scaled_count(r_synapse, n_devices), n_devices, rng)) {
      const std::size_t synapse = device / 2;
      const bool plus_side = (device % 2) == 0;
      std::size_t offset = synapse;
      for (auto& layer : network.weights) {
        if (offset < layer.size()) {
          double& w = layer.values()[offset];
          if ((plus_side && w > 0.0) || (!plus_side && w < 0.0)) w = 0.0;
          break;
        }
        offset -= layer.size();
      }
    }
  }

  if (r_neuron > 0.0) {
    std::size_t n_neurons = 0;
    for (std::size_t l = 1; l < network.layer_count(); ++l) n_neurons += network.layer_sizes[l];
    if (network.alive.empty()) {
      for (std::size_t l = 1; l < network.layer_count(); ++l) {
        network.alive.emplace_back(network.layer_sizes[l], 1);
      }
    }
    for (std::size_t pick : sample_without_replacement(scaled_count(r_neuron, n_neurons), n_neurons, rng)) {
      std::size_t offset = pick;
      for (auto& mask : network.alive) {
        if (offset < mask.size()) {
          mask[offset] = 0;
          break;
        }
        offset -= mask.size();
      }
    }
  }
}

Network hardware_effective(const ConductanceNetwork& cnet, const VariationSpec& spec) {
  spec.validate();
  const std::size_t n_layers = cnet.k_plus.size();

  // Per-device conductances of the differential pairs.
  std::vector<std::vector<double>> g_plus(n_layers), g_minus(n_layers);
  std::vector<std::vector<std::uint8_t>> faulted(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& kp = cnet.k_plus[l].values();
    const auto& km = cnet.k_minus[l].values();
    g_plus[l].resize(kp.size());
    g_minus[l].resize(km.size());
    faulted[l].assign(kp.size(), 0);
    for (std::size_t s = 0; s < kp.size(); ++s) {
      g_plus[l][s] = cnet.ladder.level(kp[s]);
      g_minus[l][s] = cnet.ladder.level(km[s]);
    }
  }

  // Stuck-at-off synaptic devices: the affected device reads as zero
  // conductance, before the pair is differenced.
  if (spec.r_synapse > 0.0) {
    Rng rng = derive_stream(spec.seed, "stuck-synapse");
    std::size_t n_synapses = 0;
    for (const auto& g : g_plus) n_synapses += g.size();
    const std::size_t n_devices = 2 * n_synapses;
    for (std::size_t device : sample_without_replacement(scaled_count(spec.r_synapse, n_devices), n_devices, rng)) {
      const std::size_t synapse = device / 2;
      const bool plus_side = (device % 2) == 0;
      std::size_t offset = synapse;
      for (std::size_t l = 0; l < n_layers; ++l) {
        if (offset < g_plus[l].size()) {
          (plus_side ? g_plus[l][offset] : g_minus[l][offset]) = 0.0;
          faulted[l][offset] = 1;
          break;
        }
        offset -= g_plus[l].size();
      }
    }
  }

  Network net;
  net.layer_sizes = cnet.layer_sizes;
  for (std::size_t l = 0; l < n_layers; ++l) {
    Matrix w(cnet.k_plus[l].rows(), cnet.k_plus[l].cols());
    for (std::size_t s = 0; s < w.size(); ++s) {
      w.values()[s] = g_plus[l][s] - g_minus[l][s];
    }
    net.weights.push_back(std::move(w));
    net.thresholds.push_back(cnet.thresholds[l]);
  }

  // Device-to-device spread on the programmed weights. Nominal zeros (both
  // devices unprogrammed) scatter around zero; faulted synapses are dead
  // hardware and do not get resurrected.
  if (spec.sigma_weight > 0.0) {
    Rng rng = derive_stream(spec.seed, "device-variation");
    for (std::size_t l = 0; l < n_layers; ++l) {
      auto& values = net.weights[l].values();
      const auto& kp = cnet.k_plus[l].values();
      const auto& km = cnet.k_minus[l].values();
      for (std::size_t s = 0; s < values.size(); ++s) {
        const double draw = rng.normal(values[s] != 0.0 ? 1.0 : 0.0, spec.sigma_weight);
        if (values[s] != 0.0) {
          values[s] *= draw;
        } else if (kp[s] == 0 && km[s] == 0 && !faulted[l][s]) {
          values[s] = draw;
        }
      }
    }
  }

  if (spec.sigma_th > 0.0) {
    Rng rng = derive_stream(spec.seed, "threshold-variation");
    for (auto& layer : net.thresholds) {
      apply_threshold_variation(layer, spec.sigma_th, rng);
    }
  }

  if (spec.r_neuron > 0.0) {
    Rng rng = derive_stream(spec.seed, "stuck-neuron");
    apply_stuck_at_off(net, 0.0, spec.r_neuron, rng);
  }
  return net;
}

}  // namespace ttfsim
