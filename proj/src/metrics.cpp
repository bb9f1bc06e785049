#include "ttfsim/metrics.hpp"

namespace ttfsim {

int decision_step(const ForwardTrace& trace) {
  if (trace.mode == EncodingMode::rate) return trace.total_steps;
  const LayerTrace& out = trace.output();
  int earliest = trace.total_steps;
  bool any = false;
  for (std::size_t j = 0; j < out.fired.size(); ++j) {
    if (out.fired[j] && (!any || out.firing_time[j] < earliest)) {
      earliest = out.firing_time[j];
      any = true;
    }
  }
  return earliest;
}

SpikeCounts count_spikes(const ForwardTrace& trace) {
  SpikeCounts counts;
  counts.per_layer.assign(trace.layers.size(), 0);
  if (trace.mode == EncodingMode::ttfs) {
    const int horizon = decision_step(trace);
    for (std::size_t l = 0; l < trace.layers.size(); ++l) {
      const LayerTrace& lt = trace.layers[l];
      for (std::size_t j = 0; j < lt.fired.size(); ++j) {
        if (lt.fired[j] && lt.firing_time[j] <= horizon) ++counts.per_layer[l];
      }
    }
  } else {
    for (std::size_t l = 0; l < trace.layers.size(); ++l) {
      for (int c : trace.layers[l].spike_count) counts.per_layer[l] += c;
    }
  }
  for (long c : counts.per_layer) counts.total += c;
  return counts;
}

double latency_us(const ForwardTrace& trace, double dt_us) {
  return decision_step(trace) * dt_us;
}

}  // namespace ttfsim
