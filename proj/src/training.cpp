#include "ttfsim/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ttfsim/errors.hpp"
#include "ttfsim/parallel.hpp"

namespace ttfsim {

namespace {
constexpr double kNormEpsilon = 1e-12;
}

std::vector<int> TrainConfig::layer_sizes(int input_size) const {
  std::vector<int> sizes;
  sizes.reserve(hidden.size() + 2);
  sizes.push_back(input_size);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(classes);
  return sizes;
}

void TrainConfig::validate() const {
  if (t_max < 2) throw ConfigError("t_max must be >= 2");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (alpha_penalty <= 0 || alpha_penalty >= t_max) {
    throw ConfigError("alpha_penalty must lie in (0, t_max)");
  }
  if (!(lr_decay > 0.0)) throw ConfigError("lr_decay must be positive");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(v_th > 0.0)) throw ConfigError("v_th must be positive");
  if (i_max < 1) throw ConfigError("i_max must be >= 1");
  if (classes < 2) throw ConfigError("classes must be >= 2");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden layer size must be >= 1");
  }
}

Network init_weights(const std::vector<int>& layer_sizes, double i_init, double v_th, Rng& rng) {
  Network net = Network::with_shape(layer_sizes, v_th);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const double stddev = std::sqrt(2.0 / layer_sizes[l]);
    for (double& w : net.weights[l].values()) {
      w = rng.normal(i_init, stddev);
    }
  }
  return net;
}

std::vector<int> compute_targets(const std::vector<int>& output_times, int label, int t_max,
                                 int alpha_penalty) {
  // The labelled neuron is asked to lead the earliest output spike by the
  // penalty margin (clamped at step 0). Wrong neurons are pushed behind
  // that front only while they fire inside it; wrong neurons already
  // separated from the front, and those at the window boundary, keep their
  // own time and carry no error.
  const int tau = *std::min_element(output_times.begin(), output_times.end());
  std::vector<int> targets(output_times.size());
  for (std::size_t k = 0; k < output_times.size(); ++k) {
    if (static_cast<int>(k) == label) {
      targets[k] = std::max(tau - alpha_penalty, 0);
    } else if (output_times[k] <= tau + alpha_penalty &&
               output_times[k] <= t_max - alpha_penalty) {
      targets[k] = tau + alpha_penalty;
    } else {
      targets[k] = output_times[k];
    }
  }
  return targets;
}

std::vector<double> output_deltas(const std::vector<int>& output_times,
                                  const std::vector<int>& targets, int t_max) {
  std::vector<double> deltas(output_times.size());
  for (std::size_t k = 0; k < output_times.size(); ++k) {
    deltas[k] = static_cast<double>(targets[k] - output_times[k]) / t_max;
  }
  return deltas;
}

DeltaField backprop_deltas(const ForwardTrace& trace, const Network& network,
                           std::vector<double> out_deltas) {
  const std::size_t n_layers = network.layer_count();
  DeltaField field;
  field.deltas.resize(n_layers - 1);
  field.deltas[n_layers - 2] = std::move(out_deltas);

  // Hidden layers, deepest first. The indicator compares recorded firing
  // times; a post-neuron that never fired carries T_max and therefore
  // always passes.
  for (std::size_t l = n_layers - 2; l >= 1; --l) {
    const Matrix& w = network.weights[l];
    const auto& pre_times = trace.layers[l].firing_time;
    const auto& post_times = trace.layers[l + 1].firing_time;
    const auto& post_deltas = field.deltas[l];
    auto& deltas = field.deltas[l - 1];
    deltas.assign(pre_times.size(), 0.0);
    for (std::size_t j = 0; j < pre_times.size(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < post_times.size(); ++k) {
        if (post_times[k] >= pre_times[j]) sum += post_deltas[k] * w(j, k);
      }
      deltas[j] = sum;
    }
    double norm_sq = 0.0;
    for (double d : deltas) norm_sq += d * d;
    const double norm = std::sqrt(norm_sq);
    if (norm > kNormEpsilon) {
      for (double& d : deltas) d /= norm;
    }
  }
  return field;
}

void apply_weight_updates(Network& network, const ForwardTrace& trace, const DeltaField& field,
                          double eta) {
  const int t_max = trace.total_steps;
  for (std::size_t l = 0; l + 1 < network.layer_count(); ++l) {
    Matrix& w = network.weights[l];
    const LayerTrace& pre = trace.layers[l];
    const LayerTrace& post = trace.layers[l + 1];
    const auto& deltas = field.deltas[l];
    for (std::size_t k = 0; k < post.firing_time.size(); ++k) {
      const int t_post = post.firing_time[k];
      // A neuron at the end of the window has a firing time insensitive to
      // its membrane, so the surrogate derivative is 0 there. A neuron at
      // step 0 can still be delayed and keeps the -1 slope.
      if (t_post == t_max) continue;
      const double step = eta * deltas[k] * -1.0;
      if (step == 0.0) continue;
      for (std::size_t i = 0; i < pre.firing_time.size(); ++i) {
        if (pre.fired[i] && pre.firing_time[i] <= t_post) {
          w(i, k) += step;
        }
      }
    }
  }
}

double timing_loss(const std::vector<double>& errors) {
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  return 0.5 * sum;
}

EvalResult evaluate(const Network& network, const LabeledDataset& dataset, int t_max, int i_max,
                    unsigned threads) {
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
      const SpikeSchedule schedule = encode_ttfs(dataset.images[idx], t_max, i_max);
      const ForwardTrace trace = forward_ttfs(network, schedule);
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

TrainResult train(const LabeledDataset& train_set, const LabeledDataset& test_set,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.images.empty()) throw ConfigError("empty training set");

  Rng init_rng = derive_stream(config.seed, "weight-init");
  const auto sizes = config.layer_sizes(static_cast<int>(train_set.images.front().size()));

  TrainResult result;
  result.network = init_weights(sizes, config.i_init, config.v_th, init_rng);
  Network& net = result.network;

  Network best_net = net;
  double best_accuracy = -1.0;
  int best_epoch = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  double eta = config.eta;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng shuffle_rng = derive_stream(config.seed, "epoch-shuffle", epoch);
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    long correct = 0;
    for (std::size_t idx : order) {
      const Image& image = train_set.images[idx];
      const int label = train_set.labels[idx];
      const SpikeSchedule schedule = encode_ttfs(image, config.t_max, config.i_max);
      const ForwardTrace trace = forward_ttfs(net, schedule);
      if (infer_winner(trace) == label) ++correct;

      DeltaField field;
      field.targets =
          compute_targets(trace.output().firing_time, label, config.t_max, config.alpha_penalty);
      field.errors = output_deltas(trace.output().firing_time, field.targets, config.t_max);
      const double loss = timing_loss(field.errors);
      if (!std::isfinite(loss)) {
        throw DivergenceError("loss diverged at epoch " + std::to_string(epoch));
      }
      loss_sum += loss;

      auto deltas = backprop_deltas(trace, net, field.errors);
      field.deltas = std::move(deltas.deltas);
      apply_weight_updates(net, trace, field, eta);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.eta = eta;
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
    stats.mean_loss = loss_sum / static_cast<double>(train_set.size());
    stats.test_accuracy =
        test_set.size() == 0
            ? 0.0
            : evaluate(net, test_set, config.t_max, config.i_max, config.threads).accuracy;
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

}  // namespace ttfsim
