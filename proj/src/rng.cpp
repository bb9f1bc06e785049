#include "ttfsim/rng.hpp"

#include <cmath>
#include <numbers>

#include "ttfsim/errors.hpp"

namespace ttfsim {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index) {
  std::uint64_t h = mix64(root);
  for (unsigned char c : tag) {
    h = mix64(h ^ c);
  }
  return mix64(h ^ index);
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw ConfigError("uniform_index: n must be > 0");
  // Rejection sampling to remove modulo bias.
  const std::uint64_t range = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return static_cast<std::size_t>(r % range);
}

double Rng::normal(double mean, double stddev) {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * mag * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> sample_without_replacement(std::size_t count, std::size_t n, Rng& rng) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < count && i < n; ++i) {
    std::swap(pool[i], pool[i + rng.uniform_index(n - i)]);
  }
  pool.resize(std::min(count, n));
  return pool;
}

long Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  long n = 0;
  // Poisson(a) + Poisson(b) ~ Poisson(a+b); split so exp(-mean) stays
  // representable.
  while (mean > 256.0) {
    mean -= 256.0;
    const double limit = std::exp(-256.0);
    double p = uniform();
    while (p > limit) {
      ++n;
      p *= uniform();
    }
  }
  const double limit = std::exp(-mean);
  double p = uniform();
  while (p > limit) {
    ++n;
    p *= uniform();
  }
  return n;
}

}  // namespace ttfsim
