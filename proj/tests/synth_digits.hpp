#pragma once

// Stroke-drawn digit glyphs with affine jitter: a compact test stand-in
// with handwritten-digit statistics (sparse ink, antialiased strokes,
// class identity carried by shape).
#include <algorithm>
#include <cmath>
#include <vector>
#include "ttfsim/dataset.hpp"
#include "ttfsim/rng.hpp"

namespace ttfsim::test::digits {

struct P { double x, y; };
using Stroke = std::vector<P>;

// Control polylines in a [0,1]^2 box, one set per digit.
inline std::vector<std::vector<Stroke>> templates() {
  auto seg = [](std::initializer_list<P> pts) { return Stroke(pts); };
  std::vector<std::vector<Stroke>> t(10);
  t[0] = {seg({{.5,.08},{.82,.3},{.82,.7},{.5,.92},{.18,.7},{.18,.3},{.5,.08}})};
  t[1] = {seg({{.35,.25},{.55,.1},{.55,.9}})};
  t[2] = {seg({{.2,.25},{.5,.08},{.8,.3},{.5,.55},{.2,.9},{.8,.9}})};
  t[3] = {seg({{.2,.12},{.75,.12},{.45,.45},{.8,.7},{.45,.92},{.2,.8}})};
  t[4] = {seg({{.65,.9},{.65,.1},{.2,.65},{.85,.65}})};
  t[5] = {seg({{.8,.1},{.25,.1},{.22,.45},{.6,.4},{.8,.65},{.55,.92},{.2,.85}})};
  t[6] = {seg({{.7,.08},{.35,.35},{.22,.7},{.5,.92},{.78,.7},{.6,.48},{.25,.6}})};
  t[7] = {seg({{.18,.1},{.82,.1},{.45,.9}})};
  t[8] = {seg({{.5,.5},{.75,.3},{.5,.08},{.25,.3},{.5,.5},{.78,.72},{.5,.94},{.22,.72},{.5,.5}})};
  t[9] = {seg({{.75,.4},{.4,.52},{.25,.3},{.5,.08},{.75,.3},{.72,.7},{.5,.92}})};
  return t;
}

inline double seg_dist(P a, P b, double x, double y) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double u = len2 > 0 ? ((x - a.x) * dx + (y - a.y) * dy) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  const double px = a.x + u * dx - x, py = a.y + u * dy - y;
  return std::sqrt(px * px + py * py);
}

inline ttfsim::Image draw(int digit, ttfsim::Rng& rng, int side = 20) {
  static const auto tpl = templates();
  const double angle = (rng.uniform() - 0.5) * 0.35;
  const double scale = 0.85 + rng.uniform() * 0.3;
  const double shift_x = (rng.uniform() - 0.5) * 0.18;
  const double shift_y = (rng.uniform() - 0.5) * 0.18;
  const double width = 0.05 + rng.uniform() * 0.035;   // stroke half-width
  const double ca = std::cos(angle), sa = std::sin(angle);

  std::vector<Stroke> strokes = tpl[digit];
  for (auto& s : strokes) {
    for (auto& p : s) {
      double x = (p.x - 0.5) * scale, y = (p.y - 0.5) * scale;
      p = {0.5 + shift_x + ca * x - sa * y, 0.5 + shift_y + sa * x + ca * y};
    }
  }
  ttfsim::Image im;
  im.height = side;
  im.width = side;
  im.pixels.assign(static_cast<std::size_t>(side) * side, 0);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double x = (c + 0.5) / side, y = (r + 0.5) / side;
      double d = 1e9;
      for (const auto& s : strokes) {
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
          d = std::min(d, seg_dist(s[i], s[i + 1], x, y));
        }
      }
      const double v = std::clamp((width - d) / 0.03 + 0.5, 0.0, 1.0);  // antialias ramp
      im.pixels[static_cast<std::size_t>(r) * side + c] = static_cast<std::uint8_t>(v * 255 + 0.5);
    }
  }
  return im;
}

inline ttfsim::LabeledDataset dataset(std::size_t n, std::uint64_t seed) {
  ttfsim::Rng rng(seed);
  ttfsim::LabeledDataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    const int digit = static_cast<int>(i % 10);
    ds.images.push_back(draw(digit, rng));
    ds.labels.push_back(digit);
  }
  return ds;
}

}  // namespace ttfsim::test::digits
