#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ttfsim/forward.hpp"

namespace ttfsim {

struct TrainConfig {
  std::vector<int> hidden = {128};
  int classes = 10;
  int t_max = 64;
  int alpha_penalty = 1;      // extra steps demanded of wrong outputs that fired early
  double eta = 0.02;          // initial learning rate
  double lr_decay = 0.9;      // multiplied into eta after each epoch
  double v_th = 1.6;          // threshold of every layer
  double i_init = 0.1;        // mean of the weight init distribution
  int epochs = 30;
  int patience = 5;           // stop after this many epochs without test gain; <= 0 disables
  std::uint64_t seed = 1;
  int i_max = 255;
  unsigned threads = 0;       // 0 = hardware concurrency (evaluation only)

  std::vector<int> layer_sizes(int input_size) const;
  void validate() const;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double eta = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double mean_loss = 0.0;
};

/// Error signal of one image: per-layer deltas plus the output targets they
/// came from. deltas[l] belongs to layer l+1; hidden vectors are normalized
/// to unit Euclidean length, the output vector is the raw timing error.
struct DeltaField {
  std::vector<std::vector<double>> deltas;
  std::vector<int> targets;     // per output neuron, in time steps
  std::vector<double> errors;   // per output neuron, (target - t) / T_max
};

struct EvalResult {
  double accuracy = 0.0;
  long correct = 0;
  long total = 0;
  std::vector<std::vector<long>> confusion;  // [label][prediction]
};

struct TrainResult {
  Network network;
  std::vector<EpochStats> history;
  int best_epoch = 0;  // 1-based epoch of the returned weights
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Weights drawn from Normal(i_init, 2 / n_in) per layer; uniform
/// thresholds.
Network init_weights(const std::vector<int>& layer_sizes, double i_init, double v_th, Rng& rng);

/// Target firing times for the output layer: with tau the earliest output
/// spike, the labelled neuron is asked to lead the front at
/// max(tau - alpha, 0); a wrong neuron firing inside the front
/// (t <= tau + alpha, away from the window boundary) is pushed to
/// tau + alpha; any other wrong neuron keeps its own time (no error).
std::vector<int> compute_targets(const std::vector<int>& output_times, int label, int t_max,
                                 int alpha_penalty);

/// Per-output timing error (target - t) / T_max; doubles as the output
/// delta vector.
std::vector<double> output_deltas(const std::vector<int>& output_times,
                                  const std::vector<int>& targets, int t_max);

/// Propagates output deltas backwards: a pre-neuron accumulates
/// delta * weight from every post-neuron whose recorded firing time is not
/// earlier than its own. Hidden layers are then normalized to unit length
/// (guarded at 1e-12) to keep gradients from vanishing.
DeltaField backprop_deltas(const ForwardTrace& trace, const Network& network,
                           std::vector<double> out_deltas);

/// In-place update w += eta * delta_post * d_post * S_pre(t_post), where
/// d_post is the surrogate derivative of firing time w.r.t. membrane: 0 for
/// t_post = T_max (the neuron sits at the window boundary), else -1; S_pre
/// gates on the pre-neuron having fired no later than the post-neuron.
void apply_weight_updates(Network& network, const ForwardTrace& trace, const DeltaField& field,
                          double eta);

/// Squared timing loss 0.5 * sum(e^2).
double timing_loss(const std::vector<double>& errors);

/// Online training (batch size 1): per image forward -> targets -> deltas ->
/// immediate weight update; eta decays per epoch; optional early stop keeps
/// the best-test-accuracy weights.
TrainResult train(const LabeledDataset& train_set, const LabeledDataset& test_set,
                  const TrainConfig& config, const EpochCallback& on_epoch = nullptr);

/// Accuracy of the ttfs winner rule over a dataset; images are encoded on
/// the fly. Parallel across images.
EvalResult evaluate(const Network& network, const LabeledDataset& dataset, int t_max,
                    int i_max = kDefaultMaxIntensity, unsigned threads = 0);

}  // namespace ttfsim
