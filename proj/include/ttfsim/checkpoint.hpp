#pragma once

#include <optional>
#include <string>

#include "ttfsim/analog.hpp"
#include "ttfsim/conductance.hpp"
#include "ttfsim/training.hpp"

namespace ttfsim {

/// On-disk model container: a versioned JSON document with sorted keys,
/// full-precision numbers and a content hash, so save -> load -> save is
/// byte-identical and any tampering is caught on load.
struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  std::string mode;  // "ttfs" | "rate-analog" | "rate-snn"
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> thresholds;  // empty for rate-analog

  struct Quantized {
    ConductanceLadder ladder;
    std::vector<Grid<std::uint8_t>> k_plus;
    std::vector<Grid<std::uint8_t>> k_minus;
    std::vector<double> scale;
    std::vector<std::vector<double>> thresholds;  // hardware domain
  };
  std::optional<Quantized> quantized;

  std::vector<EpochStats> history;
  std::string config_echo;  // JSON text of the command that produced this file

  bool is_spiking() const { return mode == "ttfs" || mode == "rate-snn"; }
};

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(const std::string& text);

Checkpoint checkpoint_from_network(const Network& network, std::string mode,
                                   std::string config_echo,
                                   std::vector<EpochStats> history = {});
Checkpoint checkpoint_from_analog(const AnalogNetwork& network, std::string config_echo,
                                  std::vector<EpochStats> history = {});
void attach_quantized(Checkpoint& checkpoint, const ConductanceNetwork& cnet);

Network to_network(const Checkpoint& checkpoint);
AnalogNetwork to_analog(const Checkpoint& checkpoint);
ConductanceNetwork to_conductance(const Checkpoint& checkpoint);

/// FNV-1a over a byte string; the checkpoint integrity hash.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace ttfsim
