#include "ttfsim/encoding.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "ttfsim/errors.hpp"

namespace ttfsim {

std::size_t SpikeSchedule::total_spikes() const {
  if (mode == EncodingMode::ttfs) return ttfs_times.size();
  std::size_t n = 0;
  for (const auto& times : rate_times) n += times.size();
  return n;
}

SpikeSchedule encode_ttfs(const Image& image, int t_max, int i_max) {
  if (t_max < 1) throw ConfigError("encode_ttfs: t_max must be >= 1");
  if (i_max < 1) throw ConfigError("encode_ttfs: i_max must be >= 1");
  SpikeSchedule s;
  s.mode = EncodingMode::ttfs;
  s.total_steps = t_max;
  s.ttfs_times.resize(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const long long residual = i_max - image.pixels[i];
    if (residual < 0) throw ConfigError("encode_ttfs: pixel intensity exceeds i_max");
    s.ttfs_times[i] = static_cast<int>(residual * t_max / i_max);
  }
  return s;
}

namespace detail {

std::vector<int> sample_distinct_steps(int n, int t_total, Rng& rng) {
  // Floyd's algorithm: n distinct values without materializing [0, t_total).
  std::set<int> chosen;
  for (int j = t_total - n; j < t_total; ++j) {
    const int t = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(j) + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

std::vector<int> fill_from_last_steps(int n, int t_total) {
  std::vector<int> steps(n);
  for (int i = 0; i < n; ++i) steps[i] = t_total - n + i;
  return steps;
}

}  // namespace detail

SpikeSchedule encode_rate(const Image& image, int t_total, RatePlacement placement, Rng& rng,
                          int i_max) {
  if (t_total < 1) throw ConfigError("encode_rate: t_total must be >= 1");
  if (i_max < 1) throw ConfigError("encode_rate: i_max must be >= 1");
  SpikeSchedule s;
  s.mode = EncodingMode::rate;
  s.total_steps = t_total;
  s.rate_times.resize(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double mean = static_cast<double>(image.pixels[i]) / i_max * t_total;
    const int n = static_cast<int>(std::min<long>(rng.poisson(mean), t_total));
    if (n == 0) continue;
    s.rate_times[i] = placement == RatePlacement::fill_from_last
                          ? detail::fill_from_last_steps(n, t_total)
                          : detail::sample_distinct_steps(n, t_total, rng);
  }
  return s;
}

void write_raster_csv(const SpikeSchedule& schedule, std::ostream& out) {
  out << "neuron_index,time_step\n";
  if (schedule.mode == EncodingMode::ttfs) {
    for (std::size_t i = 0; i < schedule.ttfs_times.size(); ++i) {
      out << i << ',' << schedule.ttfs_times[i] << '\n';
    }
  } else {
    for (std::size_t i = 0; i < schedule.rate_times.size(); ++i) {
      for (int t : schedule.rate_times[i]) out << i << ',' << t << '\n';
    }
  }
}

}  // namespace ttfsim
