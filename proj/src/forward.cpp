#include "ttfsim/forward.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "ttfsim/errors.hpp"

namespace ttfsim {
namespace {

void check_schedule(const Network& network, const SpikeSchedule& schedule, EncodingMode mode) {
  if (schedule.mode != mode) throw ConfigError("schedule mode does not match forward mode");
  if (schedule.neuron_count() != static_cast<std::size_t>(network.input_size())) {
    throw ShapeError("schedule width " + std::to_string(schedule.neuron_count()) +
                     " does not match input layer " + std::to_string(network.input_size()));
  }
}

void add_row(std::span<const double> row, std::vector<double>& membrane) {
  for (std::size_t j = 0; j < row.size(); ++j) membrane[j] += row[j];
}

}  // namespace

ForwardTrace forward_ttfs(const Network& network, const SpikeSchedule& schedule,
                          const ForwardOptions& options) {
  check_schedule(network, schedule, EncodingMode::ttfs);
  const int t_max = schedule.total_steps;
  const std::size_t n_layers = network.layer_count();

  ForwardTrace trace;
  trace.mode = EncodingMode::ttfs;
  trace.total_steps = t_max;
  trace.layers.resize(n_layers);

  // Input layer: the schedule is the trace.
  auto& input = trace.layers[0];
  input.firing_time = schedule.ttfs_times;
  input.fired.assign(schedule.ttfs_times.size(), 1);

  // Input spikes bucketed by step.
  std::vector<std::vector<int>> input_at(t_max + 1);
  for (std::size_t i = 0; i < schedule.ttfs_times.size(); ++i) {
    input_at[schedule.ttfs_times[i]].push_back(static_cast<int>(i));
  }

  std::vector<std::vector<double>> membrane(n_layers);
  std::vector<std::vector<int>> fired_now(n_layers);
  for (std::size_t l = 1; l < n_layers; ++l) {
    const std::size_t n = network.layer_sizes[l];
    membrane[l].assign(n, 0.0);
    auto& lt = trace.layers[l];
    lt.firing_time.assign(n, t_max);  // not-fired sentinel
    lt.fired.assign(n, 0);
    lt.fire_membrane.assign(n, 0.0);
    lt.final_membrane.assign(n, 0.0);
    if (options.record_membrane) lt.membrane_history = Matrix(t_max + 1, n);
  }

  for (int t = 0; t <= t_max; ++t) {
    const std::vector<int>* emitted = &input_at[t];
    for (std::size_t l = 1; l < n_layers; ++l) {
      auto& V = membrane[l];
      const Matrix& w = network.weights[l - 1];
      for (int i : *emitted) add_row(w.row(i), V);

      auto& lt = trace.layers[l];
      const auto& v_th = network.thresholds[l - 1];
      fired_now[l].clear();
      for (std::size_t j = 0; j < V.size(); ++j) {
        if (!lt.fired[j] && V[j] > v_th[j] && network.is_alive(l, j)) {
          lt.fired[j] = 1;
          lt.firing_time[j] = t;
          lt.fire_membrane[j] = V[j];
          fired_now[l].push_back(static_cast<int>(j));
        }
      }
      if (options.record_membrane) {
        for (std::size_t j = 0; j < V.size(); ++j) lt.membrane_history(t, j) = V[j];
      }
      emitted = &fired_now[l];
    }
  }

  for (std::size_t l = 1; l < n_layers; ++l) {
    trace.layers[l].final_membrane = membrane[l];
  }
  return trace;
}

ForwardTrace forward_rate(const Network& network, const SpikeSchedule& schedule,
                          const ForwardOptions& options) {
  check_schedule(network, schedule, EncodingMode::rate);
  const int t_total = schedule.total_steps;
  const std::size_t n_layers = network.layer_count();

  ForwardTrace trace;
  trace.mode = EncodingMode::rate;
  trace.total_steps = t_total;
  trace.layers.resize(n_layers);

  auto& input = trace.layers[0];
  input.spike_count.assign(schedule.rate_times.size(), 0);
  for (std::size_t i = 0; i < schedule.rate_times.size(); ++i) {
    input.spike_count[i] = static_cast<int>(schedule.rate_times[i].size());
  }
  if (options.record_spikes) input.rate_times = schedule.rate_times;

  std::vector<std::vector<int>> input_at(t_total);
  for (std::size_t i = 0; i < schedule.rate_times.size(); ++i) {
    for (int t : schedule.rate_times[i]) input_at[t].push_back(static_cast<int>(i));
  }

  std::vector<std::vector<double>> membrane(n_layers);
  std::vector<std::vector<int>> fired_now(n_layers);
  for (std::size_t l = 1; l < n_layers; ++l) {
    const std::size_t n = network.layer_sizes[l];
    membrane[l].assign(n, 0.0);
    auto& lt = trace.layers[l];
    lt.spike_count.assign(n, 0);
    lt.final_membrane.assign(n, 0.0);
    if (options.record_spikes) lt.rate_times.resize(n);
    if (options.record_membrane) lt.membrane_history = Matrix(t_total, n);
  }

  for (int t = 0; t < t_total; ++t) {
    const std::vector<int>* emitted = &input_at[t];
    for (std::size_t l = 1; l < n_layers; ++l) {
      auto& V = membrane[l];
      const Matrix& w = network.weights[l - 1];
      for (int i : *emitted) add_row(w.row(i), V);

      auto& lt = trace.layers[l];
      const auto& v_th = network.thresholds[l - 1];
      fired_now[l].clear();
      for (std::size_t j = 0; j < V.size(); ++j) {
        if (V[j] >= v_th[j] && network.is_alive(l, j)) {
          V[j] -= v_th[j];
          ++lt.spike_count[j];
          fired_now[l].push_back(static_cast<int>(j));
          if (options.record_spikes) lt.rate_times[j].push_back(t);
        }
      }
      if (options.record_membrane) {
        for (std::size_t j = 0; j < V.size(); ++j) lt.membrane_history(t, j) = V[j];
      }
      emitted = &fired_now[l];
    }
  }

  for (std::size_t l = 1; l < n_layers; ++l) {
    trace.layers[l].final_membrane = membrane[l];
  }
  return trace;
}

int infer_winner(const ForwardTrace& trace) {
  const LayerTrace& out = trace.output();
  if (trace.mode == EncodingMode::ttfs) {
    int best = -1;
    for (std::size_t j = 0; j < out.fired.size(); ++j) {
      if (!out.fired[j]) continue;
      if (best < 0 || out.firing_time[j] < out.firing_time[best] ||
          (out.firing_time[j] == out.firing_time[best] &&
           out.fire_membrane[j] > out.fire_membrane[best])) {
        best = static_cast<int>(j);
      }
    }
    if (best >= 0) return best;
    // Nothing fired: fall back to the membrane at the last step.
    best = 0;
    for (std::size_t j = 1; j < out.final_membrane.size(); ++j) {
      if (out.final_membrane[j] > out.final_membrane[best]) best = static_cast<int>(j);
    }
    return best;
  }
  int best = 0;
  for (std::size_t j = 1; j < out.spike_count.size(); ++j) {
    if (out.spike_count[j] > out.spike_count[best] ||
        (out.spike_count[j] == out.spike_count[best] &&
         out.final_membrane[j] > out.final_membrane[best])) {
      best = static_cast<int>(j);
    }
  }
  return best;
}

void write_trace_raster_csv(const ForwardTrace& trace, std::size_t layer, std::ostream& out) {
  const LayerTrace& lt = trace.layers.at(layer);
  out << "neuron_index,time_step\n";
  if (trace.mode == EncodingMode::ttfs) {
    for (std::size_t j = 0; j < lt.firing_time.size(); ++j) {
      if (lt.fired[j]) out << j << ',' << lt.firing_time[j] << '\n';
    }
  } else {
    for (std::size_t j = 0; j < lt.rate_times.size(); ++j) {
      for (int t : lt.rate_times[j]) out << j << ',' << t << '\n';
    }
  }
}

void write_membrane_csv(const ForwardTrace& trace, std::size_t layer, std::ostream& out) {
  const LayerTrace& lt = trace.layers.at(layer);
  out << "time_step,neuron_index,value\n";
  for (std::size_t t = 0; t < lt.membrane_history.rows(); ++t) {
    for (std::size_t j = 0; j < lt.membrane_history.cols(); ++j) {
      out << t << ',' << j << ',' << lt.membrane_history(t, j) << '\n';
    }
  }
}

}  // namespace ttfsim
