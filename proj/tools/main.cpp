// ttfsim command line: train, evaluate, quantize, fault-inject and sweep
// time-to-first-spike networks against their rate-coded baseline.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ttfsim/checkpoint.hpp"
#include "ttfsim/errors.hpp"
#include "ttfsim/sweeps.hpp"

using namespace ttfsim;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct DataArgs {
  std::string dir;
  std::string train_images, train_labels, test_images, test_labels;
};

void add_data_flags(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--data", args.dir,
                  "Directory holding the standard IDX files "
                  "(train-images-idx3-ubyte, train-labels-idx1-ubyte, "
                  "t10k-images-idx3-ubyte, t10k-labels-idx1-ubyte; .gz accepted)")
      ->envname("TTFSIM_DATA_DIR");
  cmd->add_option("--train-images", args.train_images, "Training image IDX file");
  cmd->add_option("--train-labels", args.train_labels, "Training label IDX file");
  cmd->add_option("--test-images", args.test_images, "Test image IDX file");
  cmd->add_option("--test-labels", args.test_labels, "Test label IDX file");
}

std::string find_data_file(const DataArgs& args, const std::string& explicit_path,
                           const std::string& base) {
  if (!explicit_path.empty()) return explicit_path;
  if (args.dir.empty()) {
    throw ConfigError("no dataset given: pass --data (or TTFSIM_DATA_DIR) or the per-file flags");
  }
  for (const auto& name : {base, base + ".gz"}) {
    const auto path = std::filesystem::path(args.dir) / name;
    if (std::filesystem::exists(path)) return path.string();
  }
  throw ConfigError("--data: " + base + "[.gz] not found under " + args.dir);
}

LabeledDataset prepare(LabeledDataset ds, std::size_t limit) {
  if (!ds.images.empty() && ds.images.front().height == 28 && ds.images.front().width == 28) {
    ds = crop_dataset(std::move(ds));
  }
  if (limit > 0 && limit < ds.size()) {
    ds.images.resize(limit);
    ds.labels.resize(limit);
  }
  return ds;
}

LabeledDataset load_train(const DataArgs& args, std::size_t limit) {
  return prepare(load_dataset(find_data_file(args, args.train_images, "train-images-idx3-ubyte"),
                              find_data_file(args, args.train_labels, "train-labels-idx1-ubyte")),
                 limit);
}

LabeledDataset load_test(const DataArgs& args, std::size_t limit) {
  return prepare(load_dataset(find_data_file(args, args.test_images, "t10k-images-idx3-ubyte"),
                              find_data_file(args, args.test_labels, "t10k-labels-idx1-ubyte")),
                 limit);
}

struct LadderArgs {
  std::string model = "saturating";
  double g_min = 0.0;
  double g_max = 1.0;
  double lambda = 15.0;
};

void add_ladder_flags(CLI::App* cmd, LadderArgs& args) {
  cmd->add_option("--ladder", args.model, "Conductance profile: saturating | linear")
      ->check(CLI::IsMember({"saturating", "linear"}));
  cmd->add_option("--gmin", args.g_min, "Lowest conductance level");
  cmd->add_option("--gmax", args.g_max, "Highest conductance level");
  cmd->add_option("--lambda", args.lambda, "Curvature of the saturating profile");
}

const Checkpoint& require_quantized(const Checkpoint& checkpoint, const std::string& context) {
  if (!checkpoint.quantized) {
    throw ConfigError(context + ": checkpoint has no quantized section (run quantize first)");
  }
  return checkpoint;
}

ConductanceLadder make_ladder(const LadderArgs& args) {
  return build_ladder(ladder_model_from_string(args.model), args.g_min, args.g_max, args.lambda);
}

json ladder_echo(const LadderArgs& args) {
  return {{"model", args.model},
          {"g_min", args.g_min},
          {"g_max", args.g_max},
          {"lambda", args.lambda}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing file: " + path);
}

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history,
                       const std::string& echo) {
  std::ostringstream out;
  out << "# config: " << echo << '\n';
  out << "epoch,eta,train_accuracy,test_accuracy,mean_loss\n";
  out.precision(17);
  for (const auto& h : history) {
    out << h.epoch << ',' << h.eta << ',' << h.train_accuracy << ',' << h.test_accuracy << ','
        << h.mean_loss << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<int> parse_int_list(const std::string& list) {
  std::vector<int> values;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) values.push_back(std::stoi(item));
  }
  return values;
}

/// "start:stop:count" inclusive grid, or a comma list of values.
std::vector<double> parse_grid(const std::string& grid) {
  std::vector<double> values;
  const auto c1 = grid.find(':');
  if (c1 != std::string::npos) {
    const auto c2 = grid.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError("--grid expects start:stop:count");
    const double start = std::stod(grid.substr(0, c1));
    const double stop = std::stod(grid.substr(c1 + 1, c2 - c1 - 1));
    const int count = std::stoi(grid.substr(c2 + 1));
    if (count < 1) throw ConfigError("--grid count must be >= 1");
    for (int i = 0; i < count; ++i) {
      values.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
    }
    return values;
  }
  std::istringstream in(grid);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  return values;
}

json metrics_to_json(const MetricsReport& report) {
  return {{"mode", report.mode == EncodingMode::ttfs ? "ttfs" : "rate"},
          {"t_total", report.t_total},
          {"images", report.images},
          {"accuracy", report.accuracy},
          {"mean_spikes", report.mean_spikes},
          {"mean_spikes_per_layer", report.mean_spikes_per_layer},
          {"mean_latency_us", report.mean_latency_us},
          {"energy_nj", report.mean_energy.total()},
          {"energy_sa_nj", report.mean_energy[EnergyBlock::sa]},
          {"energy_cm_nj", report.mean_energy[EnergyBlock::cm]},
          {"energy_if_nj", report.mean_energy[EnergyBlock::ifb]},
          {"energy_rpg_nj", report.mean_energy[EnergyBlock::rpg]},
          {"energy_calibrated", report.energy_calibrated}};
}

// ---------------------------------------------------------------------------

int cmd_train(const DataArgs& data, TrainConfig config, const std::string& mode,
              std::size_t train_limit, std::size_t test_limit, const std::string& out_path,
              const std::string& history_path) {
  const auto train_set = load_train(data, train_limit);
  const auto test_set = load_test(data, test_limit);

  json echo = {{"command", "train"},
               {"mode", mode},
               {"hidden", config.hidden},
               {"t_max", config.t_max},
               {"alpha_penalty", config.alpha_penalty},
               {"eta", config.eta},
               {"lr_decay", config.lr_decay},
               {"v_th", config.v_th},
               {"i_init", config.i_init},
               {"epochs", config.epochs},
               {"patience", config.patience},
               {"seed", config.seed},
               {"train_images", train_set.size()},
               {"test_images", test_set.size()}};

  auto print_epoch = [](const EpochStats& s) {
    std::cout << "epoch " << s.epoch << "  eta " << s.eta << "  train " << s.train_accuracy
              << "  test " << s.test_accuracy << "  loss " << s.mean_loss << '\n';
  };

  Checkpoint checkpoint;
  if (mode == "ttfs") {
    auto result = train(train_set, test_set, config, print_epoch);
    std::cout << "best epoch " << result.best_epoch << '\n';
    checkpoint = checkpoint_from_network(result.network, "ttfs", echo.dump(), result.history);
  } else {
    auto result = train_analog(train_set, test_set, config, print_epoch);
    std::cout << "best epoch " << result.best_epoch << '\n';
    checkpoint = checkpoint_from_analog(result.network, echo.dump(), result.history);
  }
  save_checkpoint(checkpoint, out_path);
  std::cout << "checkpoint written to " << out_path << '\n';
  if (!history_path.empty()) {
    write_history_csv(history_path, checkpoint.history, echo.dump());
  }
  return 0;
}

int cmd_eval(const DataArgs& data, const std::string& ckpt_path, int t_steps, std::size_t limit,
             std::uint64_t seed, const std::string& placement_name, std::uint64_t presentation,
             bool hardware, unsigned threads) {
  const auto checkpoint = load_checkpoint(ckpt_path);
  const auto test_set = load_test(data, limit);
  EvalResult result;
  if (checkpoint.mode == "rate-analog") {
    if (hardware) throw ConfigError("--hardware needs a spiking checkpoint");
    result = evaluate_analog(to_analog(checkpoint), test_set, kDefaultMaxIntensity, threads);
  } else {
    const Network network =
        hardware ? effective_weights(to_conductance(require_quantized(checkpoint, "--hardware")))
                 : to_network(checkpoint);
    if (checkpoint.mode == "rate-snn") {
      const auto placement = placement_name == "fill-last" ? RatePlacement::fill_from_last
                                                           : RatePlacement::poisson_random;
      result = evaluate_rate(network, test_set, t_steps, placement, seed, presentation,
                             kDefaultMaxIntensity, threads);
    } else {
      result = evaluate(network, test_set, t_steps, kDefaultMaxIntensity, threads);
    }
  }
  std::cout << "images " << result.total << "\ncorrect " << result.correct << "\naccuracy "
            << result.accuracy << '\n';
  return 0;
}

int cmd_quantize(const DataArgs& data, const std::string& ckpt_path, const std::string& out_path,
                 const LadderArgs& ladder_args, bool force, std::size_t eval_limit,
                 unsigned threads) {
  auto checkpoint = load_checkpoint(ckpt_path);
  if (checkpoint.quantized && !force) {
    throw ConfigError("checkpoint already carries a quantized section (use --force to redo)");
  }
  if (checkpoint.mode == "rate-analog") {
    throw ConfigError("analog checkpoints must be converted to a spiking network first (convert)");
  }
  const auto ladder = make_ladder(ladder_args);
  const auto network = to_network(checkpoint);
  const auto cnet = quantize_network(network, ladder);
  attach_quantized(checkpoint, cnet);

  json echo =
      json::parse(checkpoint.config_echo.empty() ? "{}" : checkpoint.config_echo, nullptr, false);
  if (echo.is_discarded()) echo = json::object();
  echo["quantize"] = ladder_echo(ladder_args);
  checkpoint.config_echo = echo.dump();
  save_checkpoint(checkpoint, out_path);

  // 50 magnitudes per sign plus zero
  const int states = 2 * (ConductanceLadder::kLevels - 1) + 1;
  std::cout << "quantized to " << states << " weight states, scales:";
  for (double s : cnet.scale) std::cout << ' ' << s;
  std::cout << "\ncheckpoint written to " << out_path << '\n';

  if (!data.dir.empty() || !data.test_images.empty()) {
    const auto test_set = load_test(data, eval_limit);
    const int t_steps = 64;
    if (checkpoint.mode == "ttfs") {
      const auto before = evaluate(network, test_set, t_steps, kDefaultMaxIntensity, threads);
      const auto after =
          evaluate(effective_weights(cnet), test_set, t_steps, kDefaultMaxIntensity, threads);
      std::cout << "accuracy before " << before.accuracy << ", after " << after.accuracy << '\n';
    } else {
      const auto before =
          evaluate_rate(network, test_set, t_steps, RatePlacement::poisson_random, 1, 0,
                        kDefaultMaxIntensity, threads);
      const auto after =
          evaluate_rate(effective_weights(cnet), test_set, t_steps, RatePlacement::poisson_random,
                        1, 0, kDefaultMaxIntensity, threads);
      std::cout << "accuracy before " << before.accuracy << ", after " << after.accuracy << '\n';
    }
  }
  return 0;
}

int cmd_convert(const DataArgs& data, const std::string& ckpt_path, const std::string& out_path,
                const LadderArgs& ladder_args, std::size_t norm_limit) {
  const auto checkpoint = load_checkpoint(ckpt_path);
  const auto analog = to_analog(checkpoint);
  const auto norm_set = load_train(data, norm_limit);
  const auto conversion = convert_to_rate_snn(analog, norm_set.images, make_ladder(ladder_args));

  json echo = {{"command", "convert"},
               {"source", ckpt_path},
               {"norm_images", norm_set.size()},
               {"ladder", ladder_echo(ladder_args)}};
  auto out =
      checkpoint_from_network(conversion.continuous, "rate-snn", echo.dump(), checkpoint.history);
  attach_quantized(out, conversion.quantized);
  save_checkpoint(out, out_path);
  std::cout << "rate network written to " << out_path << '\n';
  return 0;
}

int cmd_inject(const DataArgs& data, const std::string& ckpt_path, const VariationSpec& spec,
               int t_steps, std::size_t limit, const std::string& placement_name,
               unsigned threads) {
  const auto checkpoint = load_checkpoint(ckpt_path);
  const auto cnet = to_conductance(require_quantized(checkpoint, "inject"));
  const auto network = hardware_effective(cnet, spec);

  const auto test_set = load_test(data, limit);
  EvalResult result;
  if (checkpoint.mode == "rate-snn") {
    const auto placement = placement_name == "fill-last" ? RatePlacement::fill_from_last
                                                         : RatePlacement::poisson_random;
    result = evaluate_rate(network, test_set, t_steps, placement, spec.seed, 0,
                           kDefaultMaxIntensity, threads);
  } else {
    result = evaluate(network, test_set, t_steps, kDefaultMaxIntensity, threads);
  }
  json report = {{"command", "inject"},
                 {"checkpoint", ckpt_path},
                 {"sigma_weight", spec.sigma_weight},
                 {"sigma_th", spec.sigma_th},
                 {"r_synapse", spec.r_synapse},
                 {"r_neuron", spec.r_neuron},
                 {"seed", spec.seed},
                 {"t_steps", t_steps},
                 {"images", result.total},
                 {"accuracy", result.accuracy}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

struct SweepArgs {
  std::string type;
  std::string ttfs_path, rate_path;
  std::string t_list = "4,8,16,32,64,128,256";
  std::string param = "sigma_weight";
  std::string grid = "0:0.5:6";
  int trials = 5;
  int t_ttfs = 64;
  int t_rate = 64;
  std::size_t images = 0;
  std::uint64_t seed = 1;
  std::string out_csv, out_json;
  unsigned threads = 0;
  bool no_energy = false;
  bool hardware = false;
  double dt_us = 1.0;
};

int cmd_sweep(const DataArgs& data, const SweepArgs& args) {
  if (args.ttfs_path.empty() && args.rate_path.empty()) {
    throw ConfigError("sweep needs --ttfs and/or --rate checkpoints");
  }
  const auto test_set = load_test(data, 0);

  std::optional<Checkpoint> ttfs_ckpt, rate_ckpt;
  if (!args.ttfs_path.empty()) ttfs_ckpt = load_checkpoint(args.ttfs_path);
  if (!args.rate_path.empty()) rate_ckpt = load_checkpoint(args.rate_path);
  if (ttfs_ckpt && ttfs_ckpt->mode != "ttfs") {
    throw ConfigError("--ttfs checkpoint has mode " + ttfs_ckpt->mode);
  }
  if (rate_ckpt && rate_ckpt->mode != "rate-snn") {
    throw ConfigError("--rate checkpoint has mode " + rate_ckpt->mode);
  }
  if (ttfs_ckpt && rate_ckpt && ttfs_ckpt->layer_sizes != rate_ckpt->layer_sizes) {
    throw ConfigError(
        "compare mode needs matching architectures (ttfs vs rate layer sizes differ)");
  }

  SweepOptions options;
  options.max_images = args.images;
  options.seed = args.seed;
  options.threads = args.threads;

  json echo = {{"command", "sweep"},     {"type", args.type},     {"ttfs", args.ttfs_path},
               {"rate", args.rate_path}, {"images", args.images}, {"seed", args.seed},
               {"dt_us", args.dt_us}};

  if (args.type == "timesteps") {
    const auto t_list = parse_int_list(args.t_list);
    if (t_list.empty()) throw ConfigError("--list is empty");
    echo["t_list"] = t_list;

    std::optional<Network> ttfs_net, rate_net;
    if (ttfs_ckpt) {
      ttfs_net = args.hardware
                     ? effective_weights(to_conductance(require_quantized(*ttfs_ckpt, "--hardware")))
                     : to_network(*ttfs_ckpt);
    }
    if (rate_ckpt) {
      rate_net = args.hardware
                     ? effective_weights(to_conductance(require_quantized(*rate_ckpt, "--hardware")))
                     : to_network(*rate_ckpt);
    }
    std::optional<EnergyModel> ttfs_model, rate_model;
    if (!args.no_energy) {
      ttfs_model = calibrate_energy_model(reference_anchors(), EncodingMode::ttfs, args.dt_us);
      rate_model = calibrate_energy_model(reference_anchors(), EncodingMode::rate, args.dt_us);
    }
    const auto rows = sweep_timesteps(
        ttfs_net ? &*ttfs_net : nullptr, rate_net ? &*rate_net : nullptr, test_set, t_list,
        ttfs_model ? &*ttfs_model : nullptr, rate_model ? &*rate_model : nullptr, options);
    std::ostringstream csv;
    write_timestep_csv(rows, echo.dump(), csv);
    if (args.out_csv.empty()) {
      std::cout << csv.str();
    } else {
      write_text_file(args.out_csv, csv.str());
      std::cout << "table written to " << args.out_csv << '\n';
    }
    if (!args.out_json.empty()) {
      json doc = {{"config", echo}, {"rows", json::array()}};
      for (const auto& r : rows) doc["rows"].push_back(metrics_to_json(r));
      write_text_file(args.out_json, doc.dump(2) + "\n");
    }
    return 0;
  }

  if (args.type == "variation") {
    const auto grid = parse_grid(args.grid);
    if (grid.empty()) throw ConfigError("--grid is empty");
    const auto param = variation_param_from_string(args.param);
    echo["param"] = args.param;
    echo["grid"] = grid;
    echo["trials"] = args.trials;

    std::optional<ConductanceNetwork> ttfs_cnet, rate_cnet;
    if (ttfs_ckpt) ttfs_cnet = to_conductance(require_quantized(*ttfs_ckpt, "variation sweep"));
    if (rate_ckpt) rate_cnet = to_conductance(require_quantized(*rate_ckpt, "variation sweep"));
    const auto rows =
        sweep_variation(ttfs_cnet ? &*ttfs_cnet : nullptr, rate_cnet ? &*rate_cnet : nullptr,
                        test_set, param, grid, args.trials, args.t_ttfs, args.t_rate, options);
    std::ostringstream csv;
    write_variation_csv(rows, echo.dump(), csv);
    if (args.out_csv.empty()) {
      std::cout << csv.str();
    } else {
      write_text_file(args.out_csv, csv.str());
      std::cout << "table written to " << args.out_csv << '\n';
    }
    if (!args.out_json.empty()) {
      json doc = {{"config", echo}, {"rows", json::array()}};
      for (const auto& r : rows) {
        doc["rows"].push_back({{"mode", r.mode == EncodingMode::ttfs ? "ttfs" : "rate"},
                               {"type", to_string(r.param)},
                               {"magnitude", r.magnitude},
                               {"trial", r.trial},
                               {"accuracy", r.accuracy}});
      }
      write_text_file(args.out_json, doc.dump(2) + "\n");
    }
    return 0;
  }

  throw ConfigError("unknown sweep type: " + args.type + " (timesteps | variation)");
}

int cmd_export_raster(const DataArgs& data, const std::string& ckpt_path, long image_index,
                      int t_steps, std::uint64_t seed, const std::string& out_dir) {
  if (image_index < 0) throw ConfigError("--image must be >= 0");
  const json echo = {{"command", "export-raster"}, {"checkpoint", ckpt_path},
                     {"image", image_index},       {"t_steps", t_steps},
                     {"seed", seed}};
  const auto checkpoint = load_checkpoint(ckpt_path);
  const auto network = to_network(checkpoint);
  const auto test_set = load_test(data, 0);
  if (static_cast<std::size_t>(image_index) >= test_set.size()) {
    throw ConfigError("--image " + std::to_string(image_index) + " out of range (dataset has " +
                      std::to_string(test_set.size()) + " images)");
  }
  std::filesystem::create_directories(out_dir);

  const Image& image = test_set.images[image_index];
  ForwardOptions options;
  options.record_membrane = true;
  options.record_spikes = true;

  ForwardTrace trace;
  if (checkpoint.mode == "rate-snn") {
    Rng rng = derive_stream(seed, "rate-image", mix64(image_index));
    trace = forward_rate(network, encode_rate(image, t_steps, RatePlacement::poisson_random, rng),
                         options);
  } else {
    trace = forward_ttfs(network, encode_ttfs(image, t_steps), options);
  }

  auto layer_name = [&](std::size_t l) -> std::string {
    if (l == 0) return "input";
    if (l + 1 == trace.layers.size()) return "output";
    return trace.layers.size() == 3 ? "hidden" : "hidden" + std::to_string(l);
  };
  const std::string header = "# config: " + echo.dump() + "\n";
  for (std::size_t l = 0; l < trace.layers.size(); ++l) {
    std::ostringstream raster;
    write_trace_raster_csv(trace, l, raster);
    write_text_file(
        (std::filesystem::path(out_dir) / ("raster_" + layer_name(l) + ".csv")).string(),
        header + raster.str());
    if (l > 0) {
      std::ostringstream membrane;
      write_membrane_csv(trace, l, membrane);
      write_text_file(
          (std::filesystem::path(out_dir) / ("membrane_" + layer_name(l) + ".csv")).string(),
          header + membrane.str());
    }
  }
  std::cout << "label " << test_set.labels[image_index] << ", prediction " << infer_winner(trace)
            << ", files under " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardware-aware simulator and trainer for time-to-first-spike networks"};
  app.require_subcommand(1);

  auto* train_cmd = app.add_subcommand("train", "Train a TTFS network or its analog baseline");
  DataArgs train_data;
  add_data_flags(train_cmd, train_data);
  TrainConfig train_config;
  std::string train_mode = "ttfs";
  std::size_t train_limit = 0, train_test_limit = 0;
  int hidden = 128;
  std::string train_out = "checkpoint.json", train_history;
  train_cmd->add_option("--mode", train_mode, "ttfs | analog")
      ->check(CLI::IsMember({"ttfs", "analog"}));
  train_cmd->add_option("--hidden", hidden, "Hidden layer width")->check(CLI::PositiveNumber);
  train_cmd->add_option("--tmax", train_config.t_max, "Time steps per image");
  train_cmd->add_option("--alpha", train_config.alpha_penalty, "Penalty margin in steps");
  train_cmd->add_option("--eta", train_config.eta, "Initial learning rate");
  train_cmd->add_option("--lr-decay", train_config.lr_decay, "Learning-rate decay per epoch");
  train_cmd->add_option("--vth", train_config.v_th, "Firing threshold of every layer");
  train_cmd->add_option("--i-init", train_config.i_init, "Mean of the weight initialization");
  train_cmd->add_option("--epochs", train_config.epochs, "Training epochs");
  train_cmd->add_option("--patience", train_config.patience,
                        "Early-stop patience in epochs (0 disables)");
  train_cmd->add_option("--seed", train_config.seed, "Root seed");
  train_cmd->add_option("--threads", train_config.threads, "Evaluation worker threads");
  train_cmd->add_option("--images", train_limit, "Cap the training set size");
  train_cmd->add_option("--test-subset", train_test_limit, "Cap the test set size");
  train_cmd->add_option("--out", train_out, "Checkpoint output path");
  train_cmd->add_option("--history", train_history, "Per-epoch history CSV path");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on the test set");
  DataArgs eval_data;
  add_data_flags(eval_cmd, eval_data);
  std::string eval_ckpt;
  int eval_tsteps = 64;
  std::size_t eval_limit = 0;
  std::uint64_t eval_seed = 1, eval_presentation = 0;
  std::string eval_placement = "poisson";
  unsigned eval_threads = 0;
  eval_cmd->add_option("--ckpt", eval_ckpt, "Checkpoint path")->required();
  eval_cmd->add_option("--tsteps", eval_tsteps, "Time steps per image");
  eval_cmd->add_option("--images", eval_limit, "Cap the test set size");
  eval_cmd->add_option("--seed", eval_seed, "Seed for rate schedules");
  eval_cmd->add_option("--presentation", eval_presentation,
                       "Presentation index for fresh rate draws");
  eval_cmd->add_option("--placement", eval_placement, "poisson | fill-last")
      ->check(CLI::IsMember({"poisson", "fill-last"}));
  eval_cmd->add_option("--threads", eval_threads, "Worker threads");
  bool eval_hardware = false;
  eval_cmd->add_flag("--hardware", eval_hardware,
                     "Run the quantized hardware image instead of the float weights");

  auto* quant_cmd =
      app.add_subcommand("quantize", "Map a trained network onto the conductance lattice");
  DataArgs quant_data;
  add_data_flags(quant_cmd, quant_data);
  std::string quant_ckpt, quant_out = "quantized.json";
  LadderArgs quant_ladder;
  bool quant_force = false;
  std::size_t quant_eval_limit = 1000;
  unsigned quant_threads = 0;
  quant_cmd->add_option("--ckpt", quant_ckpt, "Checkpoint path")->required();
  quant_cmd->add_option("--out", quant_out, "Output checkpoint path");
  add_ladder_flags(quant_cmd, quant_ladder);
  quant_cmd->add_flag("--force", quant_force, "Requantize an already-quantized checkpoint");
  quant_cmd->add_option("--eval-images", quant_eval_limit,
                        "Images for the before/after accuracy report");
  quant_cmd->add_option("--threads", quant_threads, "Worker threads");

  auto* convert_cmd =
      app.add_subcommand("convert", "Turn an analog checkpoint into a rate-coded spiking network");
  DataArgs convert_data;
  add_data_flags(convert_cmd, convert_data);
  std::string convert_ckpt, convert_out = "rate-snn.json";
  LadderArgs convert_ladder;
  std::size_t convert_norm_limit = 10000;
  convert_cmd->add_option("--ckpt", convert_ckpt, "Analog checkpoint path")->required();
  convert_cmd->add_option("--out", convert_out, "Output checkpoint path");
  add_ladder_flags(convert_cmd, convert_ladder);
  convert_cmd->add_option("--norm-images", convert_norm_limit,
                          "Training images used for threshold normalization");

  auto* inject_cmd =
      app.add_subcommand("inject", "Evaluate a quantized checkpoint under hardware faults");
  DataArgs inject_data;
  add_data_flags(inject_cmd, inject_data);
  std::string inject_ckpt, inject_placement = "poisson";
  VariationSpec inject_spec;
  int inject_tsteps = 64;
  std::size_t inject_limit = 0;
  unsigned inject_threads = 0;
  inject_cmd->add_option("--ckpt", inject_ckpt, "Quantized checkpoint path")->required();
  inject_cmd->add_option("--sigma-weight", inject_spec.sigma_weight,
                         "Device-to-device weight spread");
  inject_cmd->add_option("--sigma-th", inject_spec.sigma_th, "Threshold spread");
  inject_cmd->add_option("--r-synapse", inject_spec.r_synapse, "Stuck-at-off synapse fraction");
  inject_cmd->add_option("--r-neuron", inject_spec.r_neuron, "Stuck-at-off neuron fraction");
  inject_cmd->add_option("--seed", inject_spec.seed, "Injection seed");
  inject_cmd->add_option("--tsteps", inject_tsteps, "Time steps per image");
  inject_cmd->add_option("--images", inject_limit, "Cap the test set size");
  inject_cmd->add_option("--placement", inject_placement, "poisson | fill-last")
      ->check(CLI::IsMember({"poisson", "fill-last"}));
  inject_cmd->add_option("--threads", inject_threads, "Worker threads");

  auto* sweep_cmd = app.add_subcommand("sweep", "Time-step or variation sweeps");
  DataArgs sweep_data;
  add_data_flags(sweep_cmd, sweep_data);
  SweepArgs sweep_args;
  sweep_cmd->add_option("--type", sweep_args.type, "timesteps | variation")->required();
  sweep_cmd->add_option("--ttfs", sweep_args.ttfs_path, "TTFS checkpoint");
  sweep_cmd->add_option("--rate", sweep_args.rate_path, "rate-snn checkpoint");
  sweep_cmd->add_option("--list", sweep_args.t_list, "Comma list of total time steps");
  sweep_cmd->add_option("--param", sweep_args.param,
                        "sigma_weight | sigma_th | r_synapse | r_neuron");
  sweep_cmd->add_option("--grid", sweep_args.grid, "start:stop:count or comma list");
  sweep_cmd->add_option("--trials", sweep_args.trials, "Trials per grid point");
  sweep_cmd->add_option("--tsteps-ttfs", sweep_args.t_ttfs, "TTFS window for variation sweeps");
  sweep_cmd->add_option("--tsteps-rate", sweep_args.t_rate, "Rate window for variation sweeps");
  sweep_cmd->add_option("--images", sweep_args.images, "Random test subset size (0 = all)");
  sweep_cmd->add_option("--seed", sweep_args.seed, "Root seed for subsets/schedules/injections");
  sweep_cmd->add_option("--out", sweep_args.out_csv, "CSV output path (default stdout)");
  sweep_cmd->add_option("--json", sweep_args.out_json, "JSON summary path");
  sweep_cmd->add_option("--threads", sweep_args.threads, "Worker threads");
  sweep_cmd->add_flag("--no-energy", sweep_args.no_energy, "Skip the energy model");
  sweep_cmd->add_option("--dt", sweep_args.dt_us, "Wall time per step in microseconds");
  sweep_cmd->add_flag("--hardware", sweep_args.hardware,
                      "Run quantized hardware images in timestep sweeps");

  auto* raster_cmd =
      app.add_subcommand("export-raster", "Dump spike rasters and membrane traces for one image");
  DataArgs raster_data;
  add_data_flags(raster_cmd, raster_data);
  std::string raster_ckpt, raster_dir = "rasters";
  long raster_image = 0;
  int raster_tsteps = 64;
  std::uint64_t raster_seed = 1;
  raster_cmd->add_option("--ckpt", raster_ckpt, "Checkpoint path")->required();
  raster_cmd->add_option("--image", raster_image, "Test image index")->required();
  raster_cmd->add_option("--tsteps", raster_tsteps, "Time steps per image");
  raster_cmd->add_option("--seed", raster_seed, "Seed for rate schedules");
  raster_cmd->add_option("--out-dir", raster_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (train_cmd->parsed()) {
      train_config.hidden = {hidden};
      return cmd_train(train_data, train_config, train_mode, train_limit, train_test_limit,
                       train_out, train_history);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_data, eval_ckpt, eval_tsteps, eval_limit, eval_seed, eval_placement,
                      eval_presentation, eval_hardware, eval_threads);
    }
    if (quant_cmd->parsed()) {
      return cmd_quantize(quant_data, quant_ckpt, quant_out, quant_ladder, quant_force,
                          quant_eval_limit, quant_threads);
    }
    if (convert_cmd->parsed()) {
      return cmd_convert(convert_data, convert_ckpt, convert_out, convert_ladder,
                         convert_norm_limit);
    }
    if (inject_cmd->parsed()) {
      inject_spec.validate();
      return cmd_inject(inject_data, inject_ckpt, inject_spec, inject_tsteps, inject_limit,
                        inject_placement, inject_threads);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_data, sweep_args);
    }
    if (raster_cmd->parsed()) {
      return cmd_export_raster(raster_data, raster_ckpt, raster_image, raster_tsteps, raster_seed,
                               raster_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
