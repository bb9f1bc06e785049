#pragma once

#include "ttfsim/conductance.hpp"
#include "ttfsim/training.hpp"

namespace ttfsim {

/// Continuous-valued 2-layer network: rectified hidden layer, linear
/// readout, no biases (mirrors the spiking network's structure).
struct AnalogNetwork {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;

  void validate() const;
};

struct AnalogTrainResult {
  AnalogNetwork network;
  std::vector<EpochStats> history;
  int best_epoch = 0;
};

/// He-initialized weights (zero mean).
AnalogNetwork init_analog(const std::vector<int>& layer_sizes, Rng& rng);

/// Readout values for one image; optionally exposes the hidden
/// pre-activations.
std::vector<double> analog_forward(const AnalogNetwork& net, const Image& image, int i_max,
                                   std::vector<double>* hidden_pre = nullptr);

/// Plain stochastic gradient descent (batch size 1) on the squared error
/// against one-hot targets, with the same learning-rate schedule and early
/// stopping as the spiking trainer.
AnalogTrainResult train_analog(const LabeledDataset& train_set, const LabeledDataset& test_set,
                               const TrainConfig& config, const EpochCallback& on_epoch = nullptr);

EvalResult evaluate_analog(const AnalogNetwork& net, const LabeledDataset& dataset,
                           int i_max = kDefaultMaxIntensity, unsigned threads = 0);

struct RateConversion {
  Network continuous;            // trained weights with data-normalized thresholds
  ConductanceNetwork quantized;  // same network on the 101-state lattice
};

/// Turns a trained analog network into a rate-coded spiking network:
/// thresholds are set from the largest hidden/readout activations over
/// `norm_images` so a maximally driven neuron fires about once per step,
/// then the weights are quantized like any other network.
RateConversion convert_to_rate_snn(const AnalogNetwork& net, std::span<const Image> norm_images,
                                   const ConductanceLadder& ladder,
                                   int i_max = kDefaultMaxIntensity);

/// Accuracy of a rate-coded network under Poisson input encoding. Schedules
/// are drawn per image from substreams of `seed`; `presentation` selects a
/// fresh draw for repeated runs of the same images.
EvalResult evaluate_rate(const Network& network, const LabeledDataset& dataset, int t_total,
                         RatePlacement placement, std::uint64_t seed,
                         std::uint64_t presentation = 0, int i_max = kDefaultMaxIntensity,
                         unsigned threads = 0);

}  // namespace ttfsim
