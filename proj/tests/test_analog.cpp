#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "synth_digits.hpp"
#include "ttfsim/errors.hpp"
#include "ttfsim/sweeps.hpp"

using namespace ttfsim;
using namespace ttfsim::test;

TEST_CASE("analog init and zero-epoch training are deterministic") {
  Rng a(3), b(3);
  auto na = init_analog({16, 8, 10}, a);
  auto nb = init_analog({16, 8, 10}, b);
  CHECK(na.weights[0] == nb.weights[0]);
  CHECK(na.weights[1] == nb.weights[1]);

  auto ds = digits::dataset(10, 1);
  TrainConfig config;
  config.hidden = {8};
  config.epochs = 0;
  config.seed = 9;
  auto result = train_analog(ds, {}, config);
  Rng init_rng = derive_stream(9, "analog-init");
  auto expected = init_analog({400, 8, 10}, init_rng);
  CHECK(result.network.weights[0] == expected.weights[0]);
  CHECK(result.history.empty());
}

TEST_CASE("analog training learns synthetic digits") {
  auto train_set = digits::dataset(2000, 10);
  auto test_set = digits::dataset(400, 20);
  TrainConfig config;
  config.hidden = {64};
  config.epochs = 10;
  config.seed = 4;
  auto result = train_analog(train_set, test_set, config);
  auto eval = evaluate_analog(result.network, test_set);
  CHECK(eval.accuracy >= 0.9);
}

TEST_CASE("rate conversion") {
  auto train_set = digits::dataset(2000, 10);
  auto test_set = digits::dataset(400, 20);
  TrainConfig config;
  config.hidden = {64};
  config.epochs = 10;
  config.seed = 4;
  auto result = train_analog(train_set, test_set, config);
  const double analog_accuracy = evaluate_analog(result.network, test_set).accuracy;

  auto ladder = build_ladder(LadderModel::saturating_exp, 0.0, 1.0, 15.0);
  auto conversion =
      convert_to_rate_snn(result.network, std::span(train_set.images).subspan(0, 500), ladder);

  SUBCASE("rate accuracy tracks the analog network at T = 64") {
    auto network = effective_weights(conversion.quantized);
    auto eval = evaluate_rate(network, test_set, 64, RatePlacement::poisson_random, 11);
    CHECK(eval.accuracy >= analog_accuracy - 0.015);
  }
  SUBCASE("quantized weights live on the 101-state lattice") {
    auto network = effective_weights(conversion.quantized);
    for (std::size_t l = 0; l < network.weights.size(); ++l) {
      const double scale = conversion.quantized.scale[l];
      for (double w : network.weights[l].values()) {
        const int k = nearest_level_index(ladder, std::abs(w) / scale);
        const double snapped = scale * (ladder.level(k) - ladder.level(0));
        CHECK(std::abs(std::abs(w) - snapped) < 1e-9);
      }
    }
  }
  SUBCASE("same seed reproduces the rate evaluation") {
    auto network = effective_weights(conversion.quantized);
    auto a = evaluate_rate(network, test_set, 16, RatePlacement::poisson_random, 11);
    auto b = evaluate_rate(network, test_set, 16, RatePlacement::poisson_random, 11);
    CHECK(a.accuracy == b.accuracy);
    auto c = evaluate_rate(network, test_set, 16, RatePlacement::poisson_random, 11, 1);
    CHECK(a.accuracy != doctest::Approx(c.accuracy).epsilon(1e-12));
  }
}

TEST_CASE("single-pixel probe drives the strongest hidden synapse hardest") {
  // hand-built analog net: pixel 2 feeds hidden neuron 1 far more strongly
  // than the others
  AnalogNetwork net;
  net.layer_sizes = {4, 3, 2};
  net.weights = {Matrix(4, 3, 0.05), Matrix(3, 2, 0.1)};
  net.weights[0](2, 1) = 1.0;
  std::vector<Image> norm = {make_image(2, 2, {255, 255, 255, 255})};
  auto conversion = convert_to_rate_snn(net, norm, build_ladder(LadderModel::linear, 0.0, 1.0));
  auto network = effective_weights(conversion.quantized);

  Image probe = make_image(2, 2, {0, 0, 255, 0});
  std::vector<long> counts(3, 0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    auto trace =
        forward_rate(network, encode_rate(probe, 64, RatePlacement::poisson_random, rng));
    for (int j = 0; j < 3; ++j) counts[j] += trace.layers[1].spike_count[j];
  }
  CHECK(counts[1] > counts[0]);
  CHECK(counts[1] > counts[2]);
  CHECK(counts[1] > 0);
}

TEST_CASE("all-zero analog networks convert to silent rate networks") {
  AnalogNetwork net;
  net.layer_sizes = {4, 3, 2};
  net.weights = {Matrix(4, 3), Matrix(3, 2)};
  auto ladder = build_ladder(LadderModel::linear, 0.0, 1.0);
  std::vector<Image> norm = {constant_image(2, 2, 255)};
  // quantization cannot normalize an all-zero layer
  CHECK_THROWS_AS(convert_to_rate_snn(net, norm, ladder), ConfigError);

  // a nearly-zero network keeps thresholds positive and stays silent on
  // zero input
  net.weights[0](0, 0) = 1e-9;
  net.weights[1](0, 0) = 1e-9;
  auto conversion = convert_to_rate_snn(net, norm, ladder);
  for (const auto& layer : conversion.continuous.thresholds) {
    for (double v : layer) CHECK(v > 0.0);
  }
}

TEST_CASE("IF spike count grows linearly in rate * weight / threshold") {
  // single input driving a single neuron: count over T ~ T * r * w / v_th
  const int t_total = 4096;
  const double v_th = 1.0;
  Network net = Network::with_shape({1, 1}, v_th);
  net.weights[0](0, 0) = 0.35;

  std::vector<double> xs, ys;
  Rng rng(5);
  for (double rate : {0.1, 0.2, 0.4, 0.6, 0.8}) {
    SpikeSchedule s;
    s.mode = EncodingMode::rate;
    s.total_steps = t_total;
    s.rate_times.resize(1);
    for (int t = 0; t < t_total; ++t) {
      if (rng.uniform() < rate) s.rate_times[0].push_back(t);
    }
    auto trace = forward_rate(net, s);
    const double drive = static_cast<double>(s.rate_times[0].size()) * 0.35 / v_th;
    xs.push_back(drive);
    ys.push_back(static_cast<double>(trace.output().spike_count[0]));
  }
  // least-squares slope through the origin should be ~1
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
  }
  CHECK(sxy / sxx == doctest::Approx(1.0).epsilon(0.05));
}
