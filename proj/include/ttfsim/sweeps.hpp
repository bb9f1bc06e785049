#pragma once

#include <iosfwd>

#include "ttfsim/analog.hpp"
#include "ttfsim/energy.hpp"
#include "ttfsim/variation.hpp"

namespace ttfsim {

struct SweepOptions {
  std::size_t max_images = 0;  // 0 = whole dataset; otherwise a seeded random subset
  std::uint64_t seed = 1;
  RatePlacement placement = RatePlacement::poisson_random;
  int i_max = kDefaultMaxIntensity;
  unsigned threads = 0;
};

/// Aggregate behavior of one network on one dataset at one time-step count.
struct MetricsReport {
  EncodingMode mode = EncodingMode::ttfs;
  int t_total = 0;
  long images = 0;
  double accuracy = 0.0;
  double mean_spikes = 0.0;
  std::vector<double> mean_spikes_per_layer;
  double mean_latency_us = 0.0;
  EnergyBreakdown mean_energy;  // zero when no model is supplied
  bool energy_calibrated = false;
};

/// Runs a ttfs network over a dataset collecting accuracy, spike counts,
/// decision latency and (optionally) energy.
MetricsReport measure_ttfs(const Network& network, const LabeledDataset& dataset, int t_max,
                           const EnergyModel* model, const SweepOptions& options);

/// Rate-mode counterpart; Poisson schedules are drawn per image from
/// substreams of options.seed.
MetricsReport measure_rate(const Network& network, const LabeledDataset& dataset, int t_total,
                           const EnergyModel* model, const SweepOptions& options,
                           std::uint64_t presentation = 0);

/// Re-encodes the inputs at every T in t_list and measures both networks.
/// Either network may be null.
std::vector<MetricsReport> sweep_timesteps(const Network* ttfs_net, const Network* rate_net,
                                           const LabeledDataset& dataset,
                                           const std::vector<int>& t_list,
                                           const EnergyModel* ttfs_model,
                                           const EnergyModel* rate_model,
                                           const SweepOptions& options);

enum class VariationParam { sigma_weight, sigma_th, r_synapse, r_neuron };
std::string to_string(VariationParam param);
VariationParam variation_param_from_string(const std::string& name);

struct VariationCell {
  EncodingMode mode = EncodingMode::ttfs;
  VariationParam param = VariationParam::sigma_weight;
  double magnitude = 0.0;
  int trial = 0;
  double accuracy = 0.0;
};

/// Injects one fault class at each magnitude in `grid`, `trials` times with
/// independent seeds, and evaluates accuracy. Either network may be null.
std::vector<VariationCell> sweep_variation(const ConductanceNetwork* ttfs_cnet,
                                           const ConductanceNetwork* rate_cnet,
                                           const LabeledDataset& dataset, VariationParam param,
                                           const std::vector<double>& grid, int trials,
                                           int t_ttfs, int t_rate, const SweepOptions& options);

void write_timestep_csv(const std::vector<MetricsReport>& rows, const std::string& config_echo,
                        std::ostream& out);
void write_variation_csv(const std::vector<VariationCell>& rows, const std::string& config_echo,
                         std::ostream& out);

}  // namespace ttfsim
