#pragma once

#include <array>
#include <span>
#include <string>

#include "ttfsim/metrics.hpp"

namespace ttfsim {

/// Circuit blocks the energy estimate is attributed to: synapse array,
/// current mirror, integrate-and-fire circuit, refractory period generator.
enum class EnergyBlock { sa = 0, cm = 1, ifb = 2, rpg = 3 };
inline constexpr std::array<const char*, 4> kEnergyBlockNames = {"SA", "CM", "IF", "RPG"};

struct EnergyBreakdown {
  std::array<double, 4> by_block{};  // nJ, indexed by EnergyBlock

  double total() const { return by_block[0] + by_block[1] + by_block[2] + by_block[3]; }
  double operator[](EnergyBlock b) const { return by_block[static_cast<std::size_t>(b)]; }
};

/// One measured operating point used for calibration.
struct EnergyAnchor {
  EncodingMode mode;
  int t_total;
  double mean_spikes;  // mean spikes per image, all layers
  double energy_nj;    // mean energy per image
};

/// Linear per-image energy model
///   E = e_spike * N_spikes + p_static * processing_time,
/// split across circuit blocks by fixed shares. The static term covers the
/// leakage paths that burn power for as long as an image is being
/// processed; the event term covers spike generation and array reads.
struct EnergyModel {
  EncodingMode mode = EncodingMode::ttfs;
  double e_spike_nj = 0.0;         // nJ per spike (aggregate)
  double p_static_nj_per_us = 0.0; // nJ/us of processing time (aggregate)
  double dt_us = 1.0;              // wall time per step: 0.5 us pulse + 0.5 us interval
  std::array<double, 4> block_share{};  // sums to 1; RPG share is 0 in rate mode
  bool calibrated = false;

  double predict_total(double spikes, double time_us) const {
    return e_spike_nj * spikes + p_static_nj_per_us * time_us;
  }
  EnergyBreakdown breakdown(double spikes, double time_us) const;
};

/// Default block shares: the integrate-and-fire block dominates, the
/// refractory generator draws about 2% (and does not exist in rate mode).
std::array<double, 4> default_block_shares(EncodingMode mode);

/// Non-negative least-squares fit of (e_spike, p_static) for one mode
/// against E = e_spike * N + p_static * T * dt. Needs at least two anchors
/// whose (N, T) rows are not proportional.
EnergyModel calibrate_energy_model(std::span<const EnergyAnchor> anchors, EncodingMode mode,
                                   double dt_us = 1.0);

/// Measured per-image energies of the reference 400-128-10 implementation
/// at 4 and 256 steps; used as the default calibration set.
std::span<const EnergyAnchor> reference_anchors();

/// Per-block energy of one trace: processing time is the decision latency
/// in ttfs mode and the full window in rate mode.
EnergyBreakdown estimate_energy(const ForwardTrace& trace, const EnergyModel& model);

}  // namespace ttfsim
