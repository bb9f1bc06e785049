#pragma once

#include <iosfwd>

#include "ttfsim/encoding.hpp"
#include "ttfsim/network.hpp"

namespace ttfsim {

/// Per-layer record of one simulated image.
///
/// In ttfs mode `firing_time` holds the spike step; a neuron that never
/// crossed threshold carries the sentinel value T_max with fired == false
/// (input neurons always fire, including intensity-0 inputs at T_max).
struct LayerTrace {
  std::vector<int> firing_time;
  std::vector<std::uint8_t> fired;
  std::vector<double> fire_membrane;   // membrane at the firing step (ties)
  std::vector<double> final_membrane;  // membrane after the last step (fallback winner)
  std::vector<int> spike_count;        // rate mode
  std::vector<std::vector<int>> rate_times;  // rate mode, kept when record_spikes
  Matrix membrane_history;             // (steps x neurons), kept when record_membrane
};

struct ForwardOptions {
  bool record_membrane = false;
  bool record_spikes = false;
};

struct ForwardTrace {
  EncodingMode mode = EncodingMode::ttfs;
  int total_steps = 0;
  std::vector<LayerTrace> layers;  // [0] is the input layer

  const LayerTrace& output() const { return layers.back(); }
};

/// Non-leaky integrate-and-fire pass over t = 0..T_max inclusive. A neuron
/// fires at the first step where its membrane strictly exceeds threshold
/// and it has not fired before; it then stays refractory for the rest of
/// the image. Spikes propagate through deeper layers within the same step.
ForwardTrace forward_ttfs(const Network& network, const SpikeSchedule& schedule,
                          const ForwardOptions& options = {});

/// Integrate-and-fire with reset-by-subtraction over t = 0..T_total-1:
/// a neuron fires whenever its membrane reaches threshold (V >= V_th),
/// subtracts the threshold and keeps going; no refractory state.
ForwardTrace forward_rate(const Network& network, const SpikeSchedule& schedule,
                          const ForwardOptions& options = {});

/// Decision rule. ttfs: earliest output spike wins; if nothing fired, the
/// largest final membrane wins. rate: the largest spike count wins. All
/// remaining ties break on membrane (at the firing step / final step), then
/// on the lowest neuron index.
int infer_winner(const ForwardTrace& trace);

/// `neuron_index,time_step` rows for one layer of a trace.
void write_trace_raster_csv(const ForwardTrace& trace, std::size_t layer, std::ostream& out);

/// `time_step,neuron_index,value` rows; requires record_membrane.
void write_membrane_csv(const ForwardTrace& trace, std::size_t layer, std::ostream& out);

}  // namespace ttfsim
