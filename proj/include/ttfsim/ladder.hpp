#pragma once

#include <string>
#include <vector>

namespace ttfsim {

enum class LadderModel { linear, saturating_exp, table };

/// Programmable conductance states of one synaptic device: 51 levels
/// G(0)..G(50) with G(0) = g_min. The saturating-exponential profile
/// mirrors the potentiation curve of analog memory devices; the linear
/// profile is available for ablation.
struct ConductanceLadder {
  static constexpr int kLevels = 51;

  LadderModel model = LadderModel::saturating_exp;
  double g_min = 0.0;
  double g_max = 1.0;
  double lambda = 15.0;  // curvature of the saturating profile
  std::vector<double> levels;

  double level(int k) const { return levels[static_cast<std::size_t>(k)]; }

  /// Largest representable weight magnitude, G(50) - G(0).
  double max_weight() const { return levels.back() - levels.front(); }

  /// Largest gap between adjacent levels (nearest-snap error bound).
  double max_step() const;
};

/// Linear: G(k) = g_min + k * (g_max - g_min) / 50.
/// Saturating: G(k) = g_min + (g_max - g_min) * (1 - e^(-k/lambda)) / (1 - e^(-50/lambda)).
ConductanceLadder build_ladder(LadderModel model, double g_min, double g_max,
                               double lambda = 15.0);

/// User-supplied table of 51 strictly increasing levels.
ConductanceLadder ladder_from_table(std::vector<double> levels);

std::string to_string(LadderModel model);
LadderModel ladder_model_from_string(const std::string& name);

}  // namespace ttfsim
