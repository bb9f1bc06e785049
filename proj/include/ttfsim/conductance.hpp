#pragma once

#include "ttfsim/ladder.hpp"
#include "ttfsim/network.hpp"

namespace ttfsim {

/// Hardware image of a quantized network. Every synapse is a differential
/// pair of devices programmed to ladder levels (k_plus, k_minus), at least
/// one of which always sits at level 0: the weight's sign selects the loaded
/// side, a zero weight leaves both at G(0).
///
/// scale[l] relates hardware weights back to software weights,
///   w_software = scale[l] * (G(k_plus) - G(k_minus)),
/// and thresholds are stored pre-divided by scale[l], so running the
/// hardware-domain network reproduces the software firing times.
struct ConductanceNetwork {
  std::vector<int> layer_sizes;
  ConductanceLadder ladder;
  std::vector<Grid<std::uint8_t>> k_plus;
  std::vector<Grid<std::uint8_t>> k_minus;
  std::vector<double> scale;                    // per weight layer
  std::vector<std::vector<double>> thresholds;  // hardware domain (V_th / scale)
};

/// Normalizes each weight layer by its largest magnitude and snaps every
/// weight to the nearest representable difference G(k) - G(0), giving
/// 50 magnitudes per sign plus zero: 101 states. Layers whose weights are
/// all zero cannot be normalized and raise ConfigError.
ConductanceNetwork quantize_network(const Network& network, const ConductanceLadder& ladder);

/// Software-scale view: w = scale * (G(k+) - G(k-)), thresholds multiplied
/// back by scale. Feeding this to forward_ttfs is hardware-mode inference.
Network effective_weights(const ConductanceNetwork& cnet);

/// Hardware-scale view: w = G(k+) - G(k-) with the stored (divided)
/// thresholds. Firing times match effective_weights exactly; variation
/// injections operate in this domain.
Network hardware_weights(const ConductanceNetwork& cnet);

/// Nearest ladder index for a non-negative magnitude (ties take the lower
/// index).
int nearest_level_index(const ConductanceLadder& ladder, double magnitude);

}  // namespace ttfsim
