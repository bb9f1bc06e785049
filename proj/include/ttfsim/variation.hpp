#pragma once

#include "ttfsim/conductance.hpp"
#include "ttfsim/rng.hpp"

namespace ttfsim {

/// Hardware non-idealities injected into a quantized network. Magnitudes of
/// zero are exact identities; each fault class draws from its own substream
/// of `seed`, so enabling one never changes another's draws.
struct VariationSpec {
  double sigma_weight = 0.0;  // relative device-to-device spread
  double sigma_th = 0.0;      // relative firing-threshold spread
  double r_synapse = 0.0;     // fraction of synaptic devices stuck at zero conductance
  double r_neuron = 0.0;      // fraction of neuron circuits that never emit a spike
  std::uint64_t seed = 0;

  bool is_identity() const {
    return sigma_weight == 0.0 && sigma_th == 0.0 && r_synapse == 0.0 && r_neuron == 0.0;
  }
  void validate() const;
};

/// Multiplies every nonzero weight by N(1, sigma^2) and replaces exact-zero
/// weights with N(0, sigma) draws; one draw per synapse, fixed thereafter.
void apply_device_variation(Network& network, double sigma_weight, Rng& rng);

/// Per-neuron V_th <- max(V_th * N(1, sigma^2), 0).
void apply_threshold_variation(std::vector<double>& thresholds, double sigma_th, Rng& rng);
void apply_threshold_variation(Network& network, double sigma_th, Rng& rng);

/// Sticks a fraction of synaptic devices (two per synapse; killing the
/// loaded side zeroes the weight) and a fraction of hidden/output neuron
/// circuits (masked dead: they integrate but never spike) at off.
void apply_stuck_at_off(Network& network, double r_synapse, double r_neuron, Rng& rng);

/// Full injection pipeline on the hardware image: device stuck-at faults on
/// the conductance pairs, then device variation on the differential
/// weights, then threshold variation, then neuron stuck-at masking.
/// Returns the hardware-domain network ready for forward_* runs.
Network hardware_effective(const ConductanceNetwork& cnet, const VariationSpec& spec);

}  // namespace ttfsim
