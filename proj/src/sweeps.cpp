#include "ttfsim/sweeps.hpp"

#include <algorithm>
#include <ostream>

#include "ttfsim/errors.hpp"
#include "ttfsim/parallel.hpp"

namespace ttfsim {
namespace {

std::vector<std::size_t> subset_indices(std::size_t n, const SweepOptions& options) {
  if (options.max_images == 0 || options.max_images >= n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  Rng rng = derive_stream(options.seed, "image-subset");
  auto picked = sample_without_replacement(options.max_images, n, rng);
  std::sort(picked.begin(), picked.end());
  return picked;
}

struct Accumulator {
  long correct = 0;
  long images = 0;
  double spikes = 0.0;
  std::vector<double> spikes_per_layer;
  double latency = 0.0;
  EnergyBreakdown energy;

  void add(const ForwardTrace& trace, int prediction, int label, const EnergyModel* model,
           double dt_us) {
    ++images;
    if (prediction == label) ++correct;
    const SpikeCounts counts = count_spikes(trace);
    spikes += static_cast<double>(counts.total);
    if (spikes_per_layer.empty()) spikes_per_layer.assign(counts.per_layer.size(), 0.0);
    for (std::size_t l = 0; l < counts.per_layer.size(); ++l) {
      spikes_per_layer[l] += static_cast<double>(counts.per_layer[l]);
    }
    latency += latency_us(trace, dt_us);
    if (model) {
      const EnergyBreakdown e = estimate_energy(trace, *model);
      for (std::size_t b = 0; b < e.by_block.size(); ++b) energy.by_block[b] += e.by_block[b];
    }
  }

  void merge(const Accumulator& other) {
    correct += other.correct;
    images += other.images;
    spikes += other.spikes;
    if (spikes_per_layer.empty()) spikes_per_layer = other.spikes_per_layer;
    else {
      for (std::size_t l = 0; l < other.spikes_per_layer.size(); ++l) {
        spikes_per_layer[l] += other.spikes_per_layer[l];
      }
    }
    latency += other.latency;
    for (std::size_t b = 0; b < energy.by_block.size(); ++b) {
      energy.by_block[b] += other.energy.by_block[b];
    }
  }
};

MetricsReport finalize(Accumulator acc, EncodingMode mode, int t_total, const EnergyModel* model) {
  MetricsReport report;
  report.mode = mode;
  report.t_total = t_total;
  report.images = acc.images;
  if (acc.images == 0) return report;
  const double n = static_cast<double>(acc.images);
  report.accuracy = static_cast<double>(acc.correct) / n;
  report.mean_spikes = acc.spikes / n;
  report.mean_spikes_per_layer.resize(acc.spikes_per_layer.size());
  for (std::size_t l = 0; l < acc.spikes_per_layer.size(); ++l) {
    report.mean_spikes_per_layer[l] = acc.spikes_per_layer[l] / n;
  }
  report.mean_latency_us = acc.latency / n;
  for (std::size_t b = 0; b < report.mean_energy.by_block.size(); ++b) {
    report.mean_energy.by_block[b] = acc.energy.by_block[b] / n;
  }
  report.energy_calibrated = model != nullptr && model->calibrated;
  return report;
}

}  // namespace

MetricsReport measure_ttfs(const Network& network, const LabeledDataset& dataset, int t_max,
                           const EnergyModel* model, const SweepOptions& options) {
  const auto indices = subset_indices(dataset.size(), options);
  const double dt_us = model ? model->dt_us : 1.0;
  const unsigned threads = options.threads == 0 ? default_threads() : options.threads;
  std::vector<Accumulator> partial(threads);
  parallel_for(indices.size(), threads,
               [&](std::size_t worker, std::size_t begin, std::size_t end) {
                 Accumulator& acc = partial[worker];
                 for (std::size_t p = begin; p < end; ++p) {
                   const std::size_t idx = indices[p];
                   const SpikeSchedule schedule =
                       encode_ttfs(dataset.images[idx], t_max, options.i_max);
                   const ForwardTrace trace = forward_ttfs(network, schedule);
                   acc.add(trace, infer_winner(trace), dataset.labels[idx], model, dt_us);
                 }
               });
  Accumulator total;
  for (const auto& acc : partial) total.merge(acc);
  return finalize(std::move(total), EncodingMode::ttfs, t_max, model);
}

MetricsReport measure_rate(const Network& network, const LabeledDataset& dataset, int t_total,
                           const EnergyModel* model, const SweepOptions& options,
                           std::uint64_t presentation) {
  const auto indices = subset_indices(dataset.size(), options);
  const double dt_us = model ? model->dt_us : 1.0;
  const unsigned threads = options.threads == 0 ? default_threads() : options.threads;
  std::vector<Accumulator> partial(threads);
  parallel_for(indices.size(), threads,
               [&](std::size_t worker, std::size_t begin, std::size_t end) {
                 Accumulator& acc = partial[worker];
                 for (std::size_t p = begin; p < end; ++p) {
                   const std::size_t idx = indices[p];
                   Rng rng = derive_stream(options.seed, "rate-image", mix64(idx) ^ presentation);
                   const SpikeSchedule schedule =
                       encode_rate(dataset.images[idx], t_total, options.placement, rng,
                                   options.i_max);
                   const ForwardTrace trace = forward_rate(network, schedule);
                   acc.add(trace, infer_winner(trace), dataset.labels[idx], model, dt_us);
                 }
               });
  Accumulator total;
  for (const auto& acc : partial) total.merge(acc);
  return finalize(std::move(total), EncodingMode::rate, t_total, model);
}

std::vector<MetricsReport> sweep_timesteps(const Network* ttfs_net, const Network* rate_net,
                                           const LabeledDataset& dataset,
                                           const std::vector<int>& t_list,
                                           const EnergyModel* ttfs_model,
                                           const EnergyModel* rate_model,
                                           const SweepOptions& options) {
  if (t_list.empty()) throw ConfigError("timestep sweep needs a non-empty T list");
  if (!ttfs_net && !rate_net) throw ConfigError("timestep sweep needs at least one network");
  std::vector<MetricsReport> rows;
  for (int t : t_list) {
    if (t < 1) throw ConfigError("time step counts must be >= 1");
    if (ttfs_net) rows.push_back(measure_ttfs(*ttfs_net, dataset, t, ttfs_model, options));
    if (rate_net) rows.push_back(measure_rate(*rate_net, dataset, t, rate_model, options));
  }
  return rows;
}

std::string to_string(VariationParam param) {
  switch (param) {
    case VariationParam::sigma_weight: return "sigma_weight";
    case VariationParam::sigma_th: return "sigma_th";
    case VariationParam::r_synapse: return "r_synapse";
    case VariationParam::r_neuron: return "r_neuron";
  }
  return "?";
}

VariationParam variation_param_from_string(const std::string& name) {
  if (name == "sigma_weight") return VariationParam::sigma_weight;
  if (name == "sigma_th") return VariationParam::sigma_th;
  if (name == "r_synapse") return VariationParam::r_synapse;
  if (name == "r_neuron") return VariationParam::r_neuron;
  throw ConfigError("unknown variation parameter: " + name);
}

namespace {

VariationSpec cell_spec(VariationParam param, double magnitude, std::uint64_t seed) {
  VariationSpec spec;
  spec.seed = seed;
  switch (param) {
    case VariationParam::sigma_weight: spec.sigma_weight = magnitude; break;
    case VariationParam::sigma_th: spec.sigma_th = magnitude; break;
    case VariationParam::r_synapse: spec.r_synapse = magnitude; break;
    case VariationParam::r_neuron: spec.r_neuron = magnitude; break;
  }
  return spec;
}

}  // namespace

std::vector<VariationCell> sweep_variation(const ConductanceNetwork* ttfs_cnet,
                                           const ConductanceNetwork* rate_cnet,
                                           const LabeledDataset& dataset, VariationParam param,
                                           const std::vector<double>& grid, int trials,
                                           int t_ttfs, int t_rate, const SweepOptions& options) {
  if (grid.empty()) throw ConfigError("variation sweep needs a non-empty grid");
  if (trials < 1) throw ConfigError("variation sweep needs trials >= 1");
  if (!ttfs_cnet && !rate_cnet) throw ConfigError("variation sweep needs at least one network");

  std::vector<VariationCell> rows;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t cell_index = gi * static_cast<std::size_t>(trials) + trial;
      for (int which = 0; which < 2; ++which) {
        const ConductanceNetwork* cnet = which == 0 ? ttfs_cnet : rate_cnet;
        if (!cnet) continue;
        const EncodingMode mode = which == 0 ? EncodingMode::ttfs : EncodingMode::rate;
        const VariationSpec spec = cell_spec(
            param, grid[gi],
            derive_seed(options.seed, which == 0 ? "variation-ttfs" : "variation-rate",
                        cell_index));
        const Network net = hardware_effective(*cnet, spec);
        VariationCell cell;
        cell.mode = mode;
        cell.param = param;
        cell.magnitude = grid[gi];
        cell.trial = trial;
        if (mode == EncodingMode::ttfs) {
          cell.accuracy = measure_ttfs(net, dataset, t_ttfs, nullptr, options).accuracy;
        } else {
          SweepOptions rate_options = options;
          // A fresh Poisson draw per trial; the per-image substreams still
          // make the table reproducible.
          cell.accuracy =
              measure_rate(net, dataset, t_rate, nullptr, rate_options, trial).accuracy;
        }
        rows.push_back(cell);
      }
    }
  }
  return rows;
}

void write_timestep_csv(const std::vector<MetricsReport>& rows, const std::string& config_echo,
                        std::ostream& out) {
  if (!config_echo.empty()) out << "# config: " << config_echo << '\n';
  out << "mode,t_total,images,accuracy,spikes,latency_us,energy_nj,energy_sa_nj,energy_cm_nj,"
         "energy_if_nj,energy_rpg_nj,energy_calibrated\n";
  for (const auto& r : rows) {
    out << (r.mode == EncodingMode::ttfs ? "ttfs" : "rate") << ',' << r.t_total << ',' << r.images
        << ',' << r.accuracy << ',' << r.mean_spikes << ',' << r.mean_latency_us << ','
        << r.mean_energy.total() << ',' << r.mean_energy[EnergyBlock::sa] << ','
        << r.mean_energy[EnergyBlock::cm] << ',' << r.mean_energy[EnergyBlock::ifb] << ','
        << r.mean_energy[EnergyBlock::rpg] << ','
        << (r.energy_calibrated ? "yes" : "uncalibrated") << '\n';
  }
}

void write_variation_csv(const std::vector<VariationCell>& rows, const std::string& config_echo,
                         std::ostream& out) {
  if (!config_echo.empty()) out << "# config: " << config_echo << '\n';
  out << "mode,type,magnitude,trial,accuracy\n";
  for (const auto& r : rows) {
    out << (r.mode == EncodingMode::ttfs ? "ttfs" : "rate") << ',' << to_string(r.param) << ','
        << r.magnitude << ',' << r.trial << ',' << r.accuracy << '\n';
  }
}

}  // namespace ttfsim
