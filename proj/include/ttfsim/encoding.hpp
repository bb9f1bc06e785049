#pragma once

#include <iosfwd>
#include <vector>

#include "ttfsim/dataset.hpp"
#include "ttfsim/rng.hpp"

namespace ttfsim {

enum class EncodingMode { ttfs, rate };

enum class RatePlacement {
  poisson_random,  // spikes placed uniformly without replacement
  fill_from_last,  // spikes occupy the last N time steps
};

/// Stimulus presented to the network: one firing time per input neuron
/// (ttfs) or a binary spike raster (rate).
struct SpikeSchedule {
  EncodingMode mode = EncodingMode::ttfs;
  int total_steps = 0;  // T_max (ttfs runs t = 0..T_max inclusive) or T_total (rate runs t = 0..T_total-1)

  std::vector<int> ttfs_times;  // per neuron; a zero-intensity input fires at T_max

  std::vector<std::vector<int>> rate_times;  // per neuron, sorted distinct steps in [0, T_total)

  std::size_t neuron_count() const {
    return mode == EncodingMode::ttfs ? ttfs_times.size() : rate_times.size();
  }
  std::size_t total_spikes() const;
};

/// Time-to-first-spike encoding: t = floor((i_max - I) / i_max * t_max).
/// Brighter pixels fire earlier; intensity 0 fires at the last step.
SpikeSchedule encode_ttfs(const Image& image, int t_max, int i_max = kDefaultMaxIntensity);

/// Rate encoding: per-neuron spike count drawn from Poisson with mean
/// (I / i_max) * t_total, clipped to t_total, then placed per `placement`.
SpikeSchedule encode_rate(const Image& image, int t_total, RatePlacement placement, Rng& rng,
                          int i_max = kDefaultMaxIntensity);

/// One `neuron_index,time_step` row per spike.
void write_raster_csv(const SpikeSchedule& schedule, std::ostream& out);

namespace detail {
/// n distinct steps drawn uniformly from [0, t_total), sorted.
std::vector<int> sample_distinct_steps(int n, int t_total, Rng& rng);
/// The last n steps of [0, t_total).
std::vector<int> fill_from_last_steps(int n, int t_total);
}  // namespace detail

}  // namespace ttfsim
