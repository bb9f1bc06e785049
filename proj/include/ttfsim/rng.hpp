#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ttfsim {

/// splitmix64 finalizer; used for seed derivation only.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic random stream. The engine is std::mt19937_64 (bit-exact per
/// the standard); all distributions are sampled here by hand so that results
/// are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  /// Box-Muller transform; consumes exactly two engine draws per call.
  double normal(double mean, double stddev);

  /// Knuth's product method; large means are split into Poisson(<=256)
  /// pieces, which sum to the exact target distribution.
  long poisson(double mean);

  /// Fisher-Yates shuffle (std::shuffle's draw sequence is unspecified).
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Uniform sample of `count` distinct values from [0, n) (partial
/// Fisher-Yates), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t count, std::size_t n, Rng& rng);

/// Derives the seed for a named substream of a root seed. Every stochastic
/// component draws from its own substream so that enabling one injection or
/// sweep cell never shifts the draws of another:
///   seed' = mix64(... mix64(mix64(root ^ tag[0]) ^ tag[1]) ... ^ index)
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0);

inline Rng derive_stream(std::uint64_t root, std::string_view tag, std::uint64_t index = 0) {
  return Rng(derive_seed(root, tag, index));
}

}  // namespace ttfsim
