#include "ttfsim/analog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ttfsim/errors.hpp"
#include "ttfsim/parallel.hpp"

namespace ttfsim {

void AnalogNetwork::validate() const {
  if (layer_sizes.size() != 3) {
    throw ShapeError("analog network must be input-hidden-readout");
  }
  if (weights.size() != 2 ||
      weights[0].rows() != static_cast<std::size_t>(layer_sizes[0]) ||
      weights[0].cols() != static_cast<std::size_t>(layer_sizes[1]) ||
      weights[1].rows() != static_cast<std::size_t>(layer_sizes[1]) ||
      weights[1].cols() != static_cast<std::size_t>(layer_sizes[2])) {
    throw ShapeError("analog weight matrices do not chain");
  }
}

AnalogNetwork init_analog(const std::vector<int>& layer_sizes, Rng& rng) {
  AnalogNetwork net;
  net.layer_sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    Matrix w(layer_sizes[l], layer_sizes[l + 1]);
    const double stddev = std::sqrt(2.0 / layer_sizes[l]);
    for (double& v : w.values()) v = rng.normal(0.0, stddev);
    net.weights.push_back(std::move(w));
  }
  net.validate();
  return net;
}

std::vector<double> analog_forward(const AnalogNetwork& net, const Image& image, int i_max,
                                   std::vector<double>* hidden_pre) {
  const std::size_t n_in = net.weights[0].rows();
  if (image.size() != n_in) {
    throw ShapeError("image size does not match analog input layer");
  }
  std::vector<double> a1(net.weights[0].cols(), 0.0);
  for (std::size_t i = 0; i < n_in; ++i) {
    const double p = static_cast<double>(image.pixels[i]) / i_max;
    if (p == 0.0) continue;
    const auto row = net.weights[0].row(i);
    for (std::size_t j = 0; j < a1.size(); ++j) a1[j] += p * row[j];
  }
  if (hidden_pre) *hidden_pre = a1;
  std::vector<double> out(net.weights[1].cols(), 0.0);
  for (std::size_t j = 0; j < a1.size(); ++j) {
    const double h = std::max(a1[j], 0.0);
    if (h == 0.0) continue;
    const auto row = net.weights[1].row(j);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += h * row[k];
  }
  return out;
}

namespace {

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

AnalogTrainResult train_analog(const LabeledDataset& train_set, const LabeledDataset& test_set,
                               const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (config.hidden.size() != 1) {
    throw ConfigError("analog trainer supports exactly one hidden layer");
  }
  if (train_set.images.empty()) throw ConfigError("empty training set");

  Rng init_rng = derive_stream(config.seed, "analog-init");
  const auto sizes = config.layer_sizes(static_cast<int>(train_set.images.front().size()));

  AnalogTrainResult result;
  result.network = init_analog(sizes, init_rng);
  AnalogNetwork& net = result.network;

  AnalogNetwork best_net = net;
  double best_accuracy = -1.0;
  int best_epoch = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const std::size_t n_hidden = net.weights[0].cols();
  const std::size_t n_out = net.weights[1].cols();
  std::vector<double> a1, out(n_out), err(n_out), delta_h(n_hidden);

  double eta = config.eta;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng shuffle_rng = derive_stream(config.seed, "epoch-shuffle", epoch);
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    long correct = 0;
    for (std::size_t idx : order) {
      const Image& image = train_set.images[idx];
      const int label = train_set.labels[idx];
      out = analog_forward(net, image, config.i_max, &a1);
      if (argmax(out) == label) ++correct;

      double loss = 0.0;
      for (std::size_t k = 0; k < n_out; ++k) {
        err[k] = out[k] - (static_cast<int>(k) == label ? 1.0 : 0.0);
        loss += err[k] * err[k];
      }
      loss *= 0.5;
      if (!std::isfinite(loss)) {
        throw DivergenceError("analog loss diverged at epoch " + std::to_string(epoch));
      }
      loss_sum += loss;

      // delta_h = relu'(a1) . (W2 err); update W2 then W1 with the
      // pre-update deltas.
      for (std::size_t j = 0; j < n_hidden; ++j) {
        if (a1[j] <= 0.0) {
          delta_h[j] = 0.0;
          continue;
        }
        double sum = 0.0;
        const auto row = net.weights[1].row(j);
        for (std::size_t k = 0; k < n_out; ++k) sum += row[k] * err[k];
        delta_h[j] = sum;
      }
      for (std::size_t j = 0; j < n_hidden; ++j) {
        const double h = std::max(a1[j], 0.0);
        if (h == 0.0) continue;
        auto row = net.weights[1].row(j);
        for (std::size_t k = 0; k < n_out; ++k) row[k] -= eta * h * err[k];
      }
      for (std::size_t i = 0; i < net.weights[0].rows(); ++i) {
        const double p = static_cast<double>(image.pixels[i]) / config.i_max;
        if (p == 0.0) continue;
        auto row = net.weights[0].row(i);
        for (std::size_t j = 0; j < n_hidden; ++j) row[j] -= eta * p * delta_h[j];
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.eta = eta;
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
    stats.mean_loss = loss_sum / static_cast<double>(train_set.size());
    stats.test_accuracy =
        test_set.size() == 0
            ? 0.0
            : evaluate_analog(net, test_set, config.i_max, config.threads).accuracy;
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);

    if (stats.test_accuracy > best_accuracy) {
      best_accuracy = stats.test_accuracy;
      best_epoch = epoch;
      best_net = net;
    } else if (config.patience > 0 && epoch - best_epoch >= config.patience) {
      break;
    }
    eta *= config.lr_decay;
  }

  if (config.patience > 0 && best_epoch > 0) {
    net = std::move(best_net);
    result.best_epoch = best_epoch;
  } else {
    result.best_epoch = result.history.empty() ? 0 : result.history.back().epoch;
  }
  return result;
}

EvalResult evaluate_analog(const AnalogNetwork& net, const LabeledDataset& dataset, int i_max,
                           unsigned threads) {
  const std::size_t n = dataset.size();
  const int classes = net.layer_sizes.back();
  EvalResult result;
  result.total = static_cast<long>(n);
  result.confusion.assign(classes, std::vector<long>(classes, 0));
  if (n == 0) return result;

  if (threads == 0) threads = default_threads();
  std::vector<EvalResult> partial(threads);
  parallel_for(n, threads, [&](std::size_t worker, std::size_t begin, std::size_t end) {
    EvalResult& local = partial[worker];
    local.confusion.assign(classes, std::vector<long>(classes, 0));
    for (std::size_t idx = begin; idx < end; ++idx) {
      const int prediction = argmax(analog_forward(net, dataset.images[idx], i_max));
      const int label = dataset.labels[idx];
      ++local.confusion[label][prediction];
      if (prediction == label) ++local.correct;
    }
  });
  for (const auto& local : partial) {
    if (local.confusion.empty()) continue;
    result.correct += local.correct;
    for (int a = 0; a < classes; ++a) {
      for (int b = 0; b < classes; ++b) result.confusion[a][b] += local.confusion[a][b];
    }
  }
  result.accuracy = static_cast<double>(result.correct) / static_cast<double>(n);
  return result;
}

RateConversion convert_to_rate_snn(const AnalogNetwork& net, std::span<const Image> norm_images,
                                   const ConductanceLadder& ladder, int i_max) {
  net.validate();
  if (norm_images.empty()) throw ConfigError("convert_to_rate_snn needs normalization images");

  // Largest unit-rate-driven activations over the normalization set.
  double max_hidden = 0.0;
  double max_out = 0.0;
  std::vector<double> a1;
  for (const Image& image : norm_images) {
    const auto out = analog_forward(net, image, i_max, &a1);
    for (double v : a1) max_hidden = std::max(max_hidden, v);
    for (double v : out) max_out = std::max(max_out, v);
  }
  // A hidden neuron driven at the observed maximum then fires once per
  // step; the readout threshold is expressed relative to the hidden rates.
  const double v_th_hidden = max_hidden > 0.0 ? max_hidden : 1.0;
  const double v_th_out = max_out > 0.0 ? max_out / v_th_hidden : 1.0;

  RateConversion conversion;
  conversion.continuous.layer_sizes = net.layer_sizes;
  conversion.continuous.weights = net.weights;
  conversion.continuous.thresholds = {
      std::vector<double>(net.layer_sizes[1], v_th_hidden),
      std::vector<double>(net.layer_sizes[2], v_th_out),
  };
  conversion.quantized = quantize_network(conversion.continuous, ladder);
  return conversion;
}

EvalResult evaluate_rate(const Network& network, const LabeledDataset& dataset, int t_total,
                         RatePlacement placement, std::uint64_t seed, std::uint64_t presentation,
                         int i_max, unsigned threads) {
  const std::size_t n = dataset.size();
  const int classes = network.output_size();
  EvalResult result;
  result.total = static_cast<long>(n);
  result.confusion.assign(classes, std::vector<long>(classes, 0));
  if (n == 0) return result;

  if (threads == 0) threads = default_threads();
  std::vector<EvalResult> partial(threads);
  parallel_for(n, threads, [&](std::size_t worker, std::size_t begin, std::size_t end) {
    EvalResult& local = partial[worker];
    local.confusion.assign(classes, std::vector<long>(classes, 0));
    for (std::size_t idx = begin; idx < end; ++idx) {
      Rng rng = derive_stream(seed, "rate-image", mix64(idx) ^ presentation);
      const SpikeSchedule schedule =
          encode_rate(dataset.images[idx], t_total, placement, rng, i_max);
      const ForwardTrace trace = forward_rate(network, schedule);
      const int prediction = infer_winner(trace);
      const int label = dataset.labels[idx];
      ++local.confusion[label][prediction];
      if (prediction == label) ++local.correct;
    }
  });
  for (const auto& local : partial) {
    if (local.confusion.empty()) continue;
    result.correct += local.correct;
    for (int a = 0; a < classes; ++a) {
      for (int b = 0; b < classes; ++b) result.confusion[a][b] += local.confusion[a][b];
    }
  }
  result.accuracy = static_cast<double>(result.correct) / static_cast<double>(n);
  return result;
}

}  // namespace ttfsim
