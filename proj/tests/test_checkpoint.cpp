#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "ttfsim/checkpoint.hpp"
#include "ttfsim/errors.hpp"

using namespace ttfsim;
using namespace ttfsim::test;

namespace {

Checkpoint sample_checkpoint() {
  Rng rng(21);
  auto net = random_network({6, 4, 3}, 1.6, -0.7, 0.7, rng);
  EpochStats stats;
  stats.epoch = 1;
  stats.eta = 0.02;
  stats.train_accuracy = 0.5;
  stats.test_accuracy = 0.6;
  stats.mean_loss = 0.01;
  auto checkpoint =
      checkpoint_from_network(net, "ttfs", R"({"command":"train","seed":21})", {stats});
  auto ladder = build_ladder(LadderModel::saturating_exp, 0.0, 1.0, 15.0);
  attach_quantized(checkpoint, quantize_network(net, ladder));
  return checkpoint;
}

}  // namespace

TEST_CASE("save, load, save is byte-identical") {
  auto checkpoint = sample_checkpoint();
  const std::string first = serialize_checkpoint(checkpoint);
  auto loaded = parse_checkpoint(first);
  const std::string second = serialize_checkpoint(loaded);
  CHECK(first == second);
}

TEST_CASE("round trip preserves every field") {
  auto checkpoint = sample_checkpoint();
  auto loaded = parse_checkpoint(serialize_checkpoint(checkpoint));
  CHECK(loaded.mode == "ttfs");
  CHECK(loaded.layer_sizes == checkpoint.layer_sizes);
  for (std::size_t l = 0; l < checkpoint.weights.size(); ++l) {
    CHECK(loaded.weights[l] == checkpoint.weights[l]);
    CHECK(loaded.thresholds[l] == checkpoint.thresholds[l]);
  }
  REQUIRE(loaded.quantized.has_value());
  CHECK(loaded.quantized->scale == checkpoint.quantized->scale);
  CHECK(loaded.quantized->k_plus[0] == checkpoint.quantized->k_plus[0]);
  CHECK(loaded.quantized->ladder.levels == checkpoint.quantized->ladder.levels);
  REQUIRE(loaded.history.size() == 1);
  CHECK(loaded.history[0].test_accuracy == 0.6);
  CHECK(loaded.config_echo == checkpoint.config_echo);

  auto net = to_network(loaded);
  net.validate();
  auto cnet = to_conductance(loaded);
  CHECK(effective_weights(cnet).weights[0].rows() == 6);
}

TEST_CASE("tampering is detected") {
  auto text = serialize_checkpoint(sample_checkpoint());
  auto broken = text;
  const auto pos = broken.find("\"mode\": \"ttfs\"");
  REQUIRE(pos != std::string::npos);
  broken.replace(pos, 14, "\"mode\": \"rate\"");
  CHECK_THROWS_AS(parse_checkpoint(broken), CheckpointError);
  CHECK_THROWS_AS(parse_checkpoint("{\"x\": 1}"), CheckpointError);
  CHECK_THROWS_AS(parse_checkpoint("not json"), CheckpointError);
}

TEST_CASE("file round trip") {
  const std::string path = "ttfsim_test_ckpt.json";
  auto checkpoint = sample_checkpoint();
  save_checkpoint(checkpoint, path);
  auto loaded = load_checkpoint(path);
  CHECK(loaded.weights[0] == checkpoint.weights[0]);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_checkpoint(path), ConfigError);
}

TEST_CASE("mode guards") {
  auto checkpoint = sample_checkpoint();
  CHECK_THROWS_AS(to_analog(checkpoint), CheckpointError);

  AnalogNetwork analog;
  analog.layer_sizes = {4, 3, 2};
  analog.weights = {Matrix(4, 3, 0.1), Matrix(3, 2, 0.1)};
  auto ack = checkpoint_from_analog(analog, "{}");
  auto loaded = parse_checkpoint(serialize_checkpoint(ack));
  CHECK_THROWS_AS(to_network(loaded), CheckpointError);
  CHECK(to_analog(loaded).weights[0] == analog.weights[0]);
  CHECK_THROWS_AS(to_conductance(loaded), CheckpointError);
}

TEST_CASE("shape validation on load") {
  auto checkpoint = sample_checkpoint();
  checkpoint.layer_sizes = {6, 4, 4};  // no longer chains with the payload
  CHECK_THROWS_AS(parse_checkpoint(serialize_checkpoint(checkpoint)), CheckpointError);
}

TEST_CASE("fnv1a64 reference values") {
  // reference digests of the 64-bit FNV-1a specification
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}
