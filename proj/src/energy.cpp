#include "ttfsim/energy.hpp"

#include <cmath>
#include <vector>

#include "ttfsim/errors.hpp"

namespace ttfsim {

EnergyBreakdown EnergyModel::breakdown(double spikes, double time_us) const {
  const double total = predict_total(spikes, time_us);
  EnergyBreakdown out;
  for (std::size_t b = 0; b < out.by_block.size(); ++b) {
    out.by_block[b] = total * block_share[b];
  }
  return out;
}

std::array<double, 4> default_block_shares(EncodingMode mode) {
  if (mode == EncodingMode::ttfs) {
    return {0.20, 0.18, 0.60, 0.02};  // SA, CM, IF, RPG
  }
  return {0.31, 0.26, 0.43, 0.0};  // no refractory generator in rate mode
}

EnergyModel calibrate_energy_model(std::span<const EnergyAnchor> anchors, EncodingMode mode,
                                   double dt_us) {
  if (!(dt_us > 0.0)) throw ConfigError("dt_us must be positive");
  std::vector<const EnergyAnchor*> selected;
  for (const auto& a : anchors) {
    if (a.mode == mode) selected.push_back(&a);
  }
  if (selected.size() < 2) {
    throw ConfigError("energy calibration needs at least two anchors per mode");
  }

  // Least squares for E = e*N + p*time via the normal equations.
  double snn = 0.0, snt = 0.0, stt = 0.0, sne = 0.0, ste = 0.0;
  for (const auto* a : selected) {
    const double n = a->mean_spikes;
    const double t = a->t_total * dt_us;
    snn += n * n;
    snt += n * t;
    stt += t * t;
    sne += n * a->energy_nj;
    ste += t * a->energy_nj;
  }
  const double det = snn * stt - snt * snt;
  if (std::abs(det) < 1e-12 * snn * stt || snn == 0.0 || stt == 0.0) {
    throw ConfigError("energy calibration is rank-deficient: anchors are proportional");
  }
  double e_spike = (sne * stt - ste * snt) / det;
  double p_static = (ste * snn - sne * snt) / det;
  // Clamp-and-refit keeps both coefficients physical.
  if (e_spike < 0.0) {
    e_spike = 0.0;
    p_static = ste / stt;
  }
  if (p_static < 0.0) {
    p_static = 0.0;
    e_spike = sne / snn;
  }

  EnergyModel model;
  model.mode = mode;
  model.e_spike_nj = e_spike;
  model.p_static_nj_per_us = p_static;
  model.dt_us = dt_us;
  model.block_share = default_block_shares(mode);
  model.calibrated = true;
  return model;
}

std::span<const EnergyAnchor> reference_anchors() {
  static const EnergyAnchor anchors[] = {
      {EncodingMode::ttfs, 4, 162.0, 2.16},
      {EncodingMode::ttfs, 256, 162.0, 24.6},
      {EncodingMode::rate, 4, 49.5, 5.65},
      {EncodingMode::rate, 256, 30793.0, 372.0},
  };
  return anchors;
}

EnergyBreakdown estimate_energy(const ForwardTrace& trace, const EnergyModel& model) {
  if (trace.mode != model.mode) throw ConfigError("energy model mode does not match trace");
  const double spikes = static_cast<double>(count_spikes(trace).total);
  const double time_us = trace.mode == EncodingMode::ttfs
                             ? latency_us(trace, model.dt_us)
                             : trace.total_steps * model.dt_us;
  return model.breakdown(spikes, time_us);
}

}  // namespace ttfsim
