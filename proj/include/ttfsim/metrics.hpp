#pragma once

#include "ttfsim/forward.hpp"

namespace ttfsim {

struct SpikeCounts {
  std::vector<long> per_layer;
  long total = 0;
};

/// Step at which the decision is available: the earliest output spike in
/// ttfs mode (the full window if nothing fired, where the membrane fallback
/// decides), the last step in rate mode.
int decision_step(const ForwardTrace& trace);

/// Spikes that occur before the decision: ttfs counts every layer's spikes
/// with timestamps up to the winner's firing step; rate counts everything
/// through the window.
SpikeCounts count_spikes(const ForwardTrace& trace);

/// decision_step expressed in wall time.
double latency_us(const ForwardTrace& trace, double dt_us);

}  // namespace ttfsim
