#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "synth_digits.hpp"
#include "ttfsim/checkpoint.hpp"

using namespace ttfsim;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string out_path = "cli_scratch/last_output.txt";
  const std::string cmd = std::string("env -u TTFSIM_DATA_DIR ") + TTFSIM_BIN + " " + args +
                          " > " + out_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, buffer.str()};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void write_idx(const fs::path& dir, const LabeledDataset& ds, const std::string& image_name,
               const std::string& label_name) {
  std::vector<std::uint8_t> images;
  images.insert(images.end(), {0, 0, 8, 3});
  auto push32 = [&](std::uint32_t v) {
    images.push_back(v >> 24);
    images.push_back(v >> 16);
    images.push_back(v >> 8);
    images.push_back(v);
  };
  push32(static_cast<std::uint32_t>(ds.size()));
  push32(ds.images.front().height);
  push32(ds.images.front().width);
  for (const auto& im : ds.images) images.insert(images.end(), im.pixels.begin(), im.pixels.end());
  write_bytes(dir / image_name, images);

  std::vector<std::uint8_t> labels = {0, 0, 8, 1};
  const std::uint32_t n = static_cast<std::uint32_t>(ds.size());
  labels.insert(labels.end(), {static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16),
                               static_cast<std::uint8_t>(n >> 8), static_cast<std::uint8_t>(n)});
  for (int label : ds.labels) labels.push_back(static_cast<std::uint8_t>(label));
  write_bytes(dir / label_name, labels);
}

const std::string& data_dir() {
  static const std::string dir = [] {
    fs::remove_all("cli_scratch");
    fs::create_directories("cli_scratch/data");
    write_idx("cli_scratch/data", test::digits::dataset(1200, 10), "train-images-idx3-ubyte",
              "train-labels-idx1-ubyte");
    write_idx("cli_scratch/data", test::digits::dataset(300, 20), "t10k-images-idx3-ubyte",
              "t10k-labels-idx1-ubyte");
    return std::string("cli_scratch/data");
  }();
  return dir;
}

}  // namespace

TEST_CASE("no arguments is a usage error") {
  fs::create_directories("cli_scratch");
  CHECK(run("").exit_code == 2);
  CHECK(run("--help").exit_code == 0);
  CHECK(run("frobnicate").exit_code == 2);
}

TEST_CASE("missing data path names the flag") {
  fs::create_directories("cli_scratch");
  auto ck = run("train --mode ttfs --epochs 0 --out cli_scratch/x.json");
  CHECK(ck.exit_code == 2);
  CHECK(ck.output.find("--data") != std::string::npos);
}

TEST_CASE("full pipeline over the CLI") {
  const auto& data = data_dir();

  // zero-epoch training still writes a loadable checkpoint
  auto zero = run("train --mode ttfs --data " + data +
                  " --hidden 16 --epochs 0 --tmax 32 --out cli_scratch/zero.json");
  CHECK(zero.exit_code == 0);
  CHECK(load_checkpoint("cli_scratch/zero.json").mode == "ttfs");

  auto trained = run("train --mode ttfs --data " + data +
                     " --hidden 24 --epochs 2 --tmax 32 --seed 7 --out cli_scratch/ttfs.json"
                     " --history cli_scratch/history.csv");
  CHECK(trained.exit_code == 0);
  {
    auto checkpoint = load_checkpoint("cli_scratch/ttfs.json");
    CHECK(checkpoint.mode == "ttfs");
    CHECK(checkpoint.history.size() == 2);
    CHECK(!checkpoint.config_echo.empty());
    std::ifstream history("cli_scratch/history.csv");
    std::string line;
    int lines = 0;
    while (std::getline(history, line)) ++lines;
    CHECK(lines == 2 + 2);  // config + header + rows
  }

  auto eval = run("eval --ckpt cli_scratch/ttfs.json --data " + data + " --tsteps 32");
  CHECK(eval.exit_code == 0);
  CHECK(eval.output.find("accuracy") != std::string::npos);

  auto quantized = run("quantize --ckpt cli_scratch/ttfs.json --out cli_scratch/ttfs-q.json"
                       " --data " + data + " --eval-images 100");
  CHECK(quantized.exit_code == 0);
  CHECK(quantized.output.find("101") != std::string::npos);
  CHECK(load_checkpoint("cli_scratch/ttfs-q.json").quantized.has_value());

  // a second quantize without --force refuses
  auto again = run("quantize --ckpt cli_scratch/ttfs-q.json --out cli_scratch/ttfs-q2.json");
  CHECK(again.exit_code == 2);
  auto forced = run("quantize --ckpt cli_scratch/ttfs-q.json --out cli_scratch/ttfs-q2.json"
                    " --force");
  CHECK(forced.exit_code == 0);

  // analog baseline and its rate conversion
  auto analog = run("train --mode analog --data " + data +
                    " --hidden 24 --epochs 2 --seed 7 --out cli_scratch/analog.json");
  CHECK(analog.exit_code == 0);
  auto converted = run("convert --ckpt cli_scratch/analog.json --data " + data +
                       " --norm-images 300 --out cli_scratch/rate.json");
  CHECK(converted.exit_code == 0);
  CHECK(load_checkpoint("cli_scratch/rate.json").mode == "rate-snn");

  auto rate_eval = run("eval --ckpt cli_scratch/rate.json --data " + data +
                       " --tsteps 32 --images 100");
  CHECK(rate_eval.exit_code == 0);

  // fault injection on the quantized network
  auto inject = run("inject --ckpt cli_scratch/ttfs-q.json --data " + data +
                    " --sigma-weight 0.1 --seed 5 --tsteps 32 --images 100");
  CHECK(inject.exit_code == 0);
  CHECK(inject.output.find("accuracy") != std::string::npos);

  // hardware-image evaluation needs a quantized section
  auto hardware_eval = run("eval --ckpt cli_scratch/ttfs-q.json --data " + data +
                           " --tsteps 32 --images 100 --hardware");
  CHECK(hardware_eval.exit_code == 0);
  auto hardware_missing = run("eval --ckpt cli_scratch/ttfs.json --data " + data +
                              " --tsteps 32 --hardware");
  CHECK(hardware_missing.exit_code == 2);
  auto inject_unquantized = run("inject --ckpt cli_scratch/ttfs.json --data " + data +
                                " --sigma-weight 0.1 --images 50");
  CHECK(inject_unquantized.exit_code == 2);

  // timestep sweep in compare mode
  auto sweep = run("sweep --type timesteps --ttfs cli_scratch/ttfs.json"
                   " --rate cli_scratch/rate.json --list 4,8 --data " + data +
                   " --images 60 --seed 3 --out cli_scratch/sweep.csv"
                   " --json cli_scratch/sweep.json");
  CHECK(sweep.exit_code == 0);
  {
    std::ifstream csv("cli_scratch/sweep.csv");
    std::string line;
    int lines = 0;
    while (std::getline(csv, line)) ++lines;
    CHECK(lines == 2 + 4);
    std::ifstream json_file("cli_scratch/sweep.json");
    CHECK(json_file.good());
  }

  // variation sweep
  auto variation = run("sweep --type variation --param sigma_weight --grid 0:0.2:2 --trials 2"
                       " --ttfs cli_scratch/ttfs-q.json --data " + data +
                       " --images 50 --tsteps-ttfs 32 --out cli_scratch/variation.csv");
  CHECK(variation.exit_code == 0);

  // empty grid is a usage error
  auto empty_grid = run("sweep --type variation --param sigma_weight --grid '' --trials 2"
                        " --ttfs cli_scratch/ttfs-q.json --data " + data);
  CHECK(empty_grid.exit_code == 2);

  // compare-mode architecture mismatch
  auto mismatch_train = run("train --mode ttfs --data " + data +
                            " --hidden 12 --epochs 0 --tmax 32 --out cli_scratch/small.json");
  CHECK(mismatch_train.exit_code == 0);
  auto mismatch = run("sweep --type timesteps --ttfs cli_scratch/small.json"
                      " --rate cli_scratch/rate.json --list 4 --data " + data);
  CHECK(mismatch.exit_code == 2);
  CHECK(mismatch.output.find("architecture") != std::string::npos);

  // raster export
  auto raster = run("export-raster --ckpt cli_scratch/ttfs.json --data " + data +
                    " --image 3 --tsteps 32 --out-dir cli_scratch/rasters");
  CHECK(raster.exit_code == 0);
  CHECK(fs::exists("cli_scratch/rasters/raster_input.csv"));
  CHECK(fs::exists("cli_scratch/rasters/raster_hidden.csv"));
  CHECK(fs::exists("cli_scratch/rasters/raster_output.csv"));
  CHECK(fs::exists("cli_scratch/rasters/membrane_output.csv"));

  auto bad_index = run("export-raster --ckpt cli_scratch/ttfs.json --data " + data +
                       " --image -1 --out-dir cli_scratch/rasters");
  CHECK(bad_index.exit_code == 2);
}

TEST_CASE("checkpoint files on disk round-trip byte-identically") {
  const auto& data = data_dir();
  auto trained = run("train --mode ttfs --data " + data +
                     " --hidden 8 --epochs 1 --tmax 16 --out cli_scratch/rt.json");
  REQUIRE(trained.exit_code == 0);
  std::ifstream in("cli_scratch/rt.json", std::ios::binary);
  std::stringstream first;
  first << in.rdbuf();
  auto checkpoint = load_checkpoint("cli_scratch/rt.json");
  save_checkpoint(checkpoint, "cli_scratch/rt2.json");
  std::ifstream in2("cli_scratch/rt2.json", std::ios::binary);
  std::stringstream second;
  second << in2.rdbuf();
  CHECK(first.str() == second.str());
}
