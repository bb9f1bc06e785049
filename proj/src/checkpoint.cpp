#include "ttfsim/checkpoint.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "ttfsim/errors.hpp"

namespace ttfsim {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.size()) throw CheckpointError("matrix payload does not match its shape");
  m.values() = data;
  return m;
}

json index_grid_to_json(const Grid<std::uint8_t>& g) {
  return json{{"rows", g.rows()}, {"cols", g.cols()}, {"data", g.values()}};
}

Grid<std::uint8_t> index_grid_from_json(const json& j) {
  Grid<std::uint8_t> g(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<std::vector<int>>();
  if (data.size() != g.size()) throw CheckpointError("index payload does not match its shape");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] < 0 || data[i] >= ConductanceLadder::kLevels) {
      throw CheckpointError("ladder index out of range");
    }
    g.values()[i] = static_cast<std::uint8_t>(data[i]);
  }
  return g;
}

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  json doc;
  doc["format_version"] = Checkpoint::kFormatVersion;
  doc["mode"] = checkpoint.mode;
  doc["layer_sizes"] = checkpoint.layer_sizes;
  doc["weights"] = json::array();
  for (const auto& w : checkpoint.weights) doc["weights"].push_back(matrix_to_json(w));
  doc["thresholds"] = checkpoint.thresholds;
  if (checkpoint.quantized) {
    const auto& q = *checkpoint.quantized;
    json jq;
    jq["ladder"] = {{"model", to_string(q.ladder.model)},
                    {"g_min", q.ladder.g_min},
                    {"g_max", q.ladder.g_max},
                    {"lambda", q.ladder.lambda},
                    {"levels", q.ladder.levels}};
    jq["k_plus"] = json::array();
    jq["k_minus"] = json::array();
    for (const auto& g : q.k_plus) jq["k_plus"].push_back(index_grid_to_json(g));
    for (const auto& g : q.k_minus) jq["k_minus"].push_back(index_grid_to_json(g));
    jq["scale"] = q.scale;
    jq["thresholds"] = q.thresholds;
    doc["quantized"] = std::move(jq);
  }
  doc["history"] = json::array();
  for (const auto& h : checkpoint.history) {
    doc["history"].push_back({{"epoch", h.epoch},
                              {"eta", h.eta},
                              {"train_accuracy", h.train_accuracy},
                              {"test_accuracy", h.test_accuracy},
                              {"mean_loss", h.mean_loss}});
  }
  if (!checkpoint.config_echo.empty() && json::accept(checkpoint.config_echo)) {
    doc["config"] = json::parse(checkpoint.config_echo);
  } else {
    doc["config"] = checkpoint.config_echo;
  }
  doc["content_hash"] = hash_hex(fnv1a64(doc.dump()));
  return doc.dump(1) + "\n";
}

Checkpoint parse_checkpoint(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("not a checkpoint document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("format_version")) {
    throw CheckpointError("not a checkpoint document");
  }
  if (doc.at("format_version").get<int>() != Checkpoint::kFormatVersion) {
    throw CheckpointError("unsupported checkpoint format_version");
  }
  const std::string stored_hash = doc.at("content_hash").get<std::string>();
  doc.erase("content_hash");
  if (hash_hex(fnv1a64(doc.dump())) != stored_hash) {
    throw CheckpointError("content hash mismatch: checkpoint is corrupt or was edited");
  }

  Checkpoint checkpoint;
  checkpoint.mode = doc.at("mode").get<std::string>();
  checkpoint.layer_sizes = doc.at("layer_sizes").get<std::vector<int>>();
  for (const auto& jw : doc.at("weights")) checkpoint.weights.push_back(matrix_from_json(jw));
  checkpoint.thresholds = doc.at("thresholds").get<std::vector<std::vector<double>>>();
  if (doc.contains("quantized")) {
    const auto& jq = doc.at("quantized");
    Checkpoint::Quantized q;
    const auto& jl = jq.at("ladder");
    q.ladder.model = ladder_model_from_string(jl.at("model").get<std::string>());
    q.ladder.g_min = jl.at("g_min").get<double>();
    q.ladder.g_max = jl.at("g_max").get<double>();
    q.ladder.lambda = jl.at("lambda").get<double>();
    q.ladder.levels = jl.at("levels").get<std::vector<double>>();
    if (q.ladder.levels.size() != ConductanceLadder::kLevels) {
      throw CheckpointError("quantized section has a malformed ladder");
    }
    for (const auto& jg : jq.at("k_plus")) q.k_plus.push_back(index_grid_from_json(jg));
    for (const auto& jg : jq.at("k_minus")) q.k_minus.push_back(index_grid_from_json(jg));
    q.scale = jq.at("scale").get<std::vector<double>>();
    q.thresholds = jq.at("thresholds").get<std::vector<std::vector<double>>>();
    checkpoint.quantized = std::move(q);
  }
  for (const auto& jh : doc.at("history")) {
    EpochStats h;
    h.epoch = jh.at("epoch").get<int>();
    h.eta = jh.at("eta").get<double>();
    h.train_accuracy = jh.at("train_accuracy").get<double>();
    h.test_accuracy = jh.at("test_accuracy").get<double>();
    h.mean_loss = jh.at("mean_loss").get<double>();
    checkpoint.history.push_back(h);
  }
  const auto& jc = doc.at("config");
  checkpoint.config_echo = jc.is_string() ? jc.get<std::string>() : jc.dump();

  // Shape self-consistency.
  if (checkpoint.layer_sizes.size() < 2 ||
      checkpoint.weights.size() != checkpoint.layer_sizes.size() - 1) {
    throw CheckpointError("checkpoint shapes do not chain");
  }
  for (std::size_t l = 0; l + 1 < checkpoint.layer_sizes.size(); ++l) {
    if (checkpoint.weights[l].rows() != static_cast<std::size_t>(checkpoint.layer_sizes[l]) ||
        checkpoint.weights[l].cols() != static_cast<std::size_t>(checkpoint.layer_sizes[l + 1])) {
      throw CheckpointError("checkpoint shapes do not chain");
    }
  }
  return checkpoint;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  out << serialize_checkpoint(checkpoint);
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(text);
}

Checkpoint checkpoint_from_network(const Network& network, std::string mode,
                                   std::string config_echo, std::vector<EpochStats> history) {
  Checkpoint checkpoint;
  checkpoint.mode = std::move(mode);
  checkpoint.layer_sizes = network.layer_sizes;
  checkpoint.weights = network.weights;
  checkpoint.thresholds = network.thresholds;
  checkpoint.history = std::move(history);
  checkpoint.config_echo = std::move(config_echo);
  return checkpoint;
}

Checkpoint checkpoint_from_analog(const AnalogNetwork& network, std::string config_echo,
                                  std::vector<EpochStats> history) {
  Checkpoint checkpoint;
  checkpoint.mode = "rate-analog";
  checkpoint.layer_sizes = network.layer_sizes;
  checkpoint.weights = network.weights;
  checkpoint.history = std::move(history);
  checkpoint.config_echo = std::move(config_echo);
  return checkpoint;
}

void attach_quantized(Checkpoint& checkpoint, const ConductanceNetwork& cnet) {
  Checkpoint::Quantized q;
  q.ladder = cnet.ladder;
  q.k_plus = cnet.k_plus;
  q.k_minus = cnet.k_minus;
  q.scale = cnet.scale;
  q.thresholds = cnet.thresholds;
  checkpoint.quantized = std::move(q);
}

Network to_network(const Checkpoint& checkpoint) {
  if (!checkpoint.is_spiking()) {
    throw CheckpointError("checkpoint mode '" + checkpoint.mode + "' is not a spiking network");
  }
  Network net;
  net.layer_sizes = checkpoint.layer_sizes;
  net.weights = checkpoint.weights;
  net.thresholds = checkpoint.thresholds;
  net.validate();
  return net;
}

AnalogNetwork to_analog(const Checkpoint& checkpoint) {
  if (checkpoint.mode != "rate-analog") {
    throw CheckpointError("checkpoint mode '" + checkpoint.mode + "' is not an analog network");
  }
  AnalogNetwork net;
  net.layer_sizes = checkpoint.layer_sizes;
  net.weights = checkpoint.weights;
  net.validate();
  return net;
}

ConductanceNetwork to_conductance(const Checkpoint& checkpoint) {
  if (!checkpoint.quantized) {
    throw CheckpointError("checkpoint has no quantized section (run quantize first)");
  }
  const auto& q = *checkpoint.quantized;
  ConductanceNetwork cnet;
  cnet.layer_sizes = checkpoint.layer_sizes;
  cnet.ladder = q.ladder;
  cnet.k_plus = q.k_plus;
  cnet.k_minus = q.k_minus;
  cnet.scale = q.scale;
  cnet.thresholds = q.thresholds;
  return cnet;
}

}  // namespace ttfsim
