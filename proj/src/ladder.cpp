#include "ttfsim/ladder.hpp"

#include <cmath>

#include "ttfsim/errors.hpp"

namespace ttfsim {

double ConductanceLadder::max_step() const {
  double step = 0.0;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    step = std::max(step, levels[k] - levels[k - 1]);
  }
  return step;
}

ConductanceLadder build_ladder(LadderModel model, double g_min, double g_max, double lambda) {
  if (!(g_min >= 0.0)) throw ConfigError("ladder: g_min must be >= 0");
  if (!(g_max > g_min)) throw ConfigError("ladder: g_max must exceed g_min");
  ConductanceLadder ladder;
  ladder.model = model;
  ladder.g_min = g_min;
  ladder.g_max = g_max;
  ladder.lambda = lambda;
  ladder.levels.resize(ConductanceLadder::kLevels);
  const int top = ConductanceLadder::kLevels - 1;
  switch (model) {
    case LadderModel::linear:
      for (int k = 0; k <= top; ++k) {
        ladder.levels[k] = g_min + (g_max - g_min) * k / top;
      }
      break;
    case LadderModel::saturating_exp: {
      if (!(lambda > 0.0)) throw ConfigError("ladder: lambda must be positive");
      const double denom = 1.0 - std::exp(-static_cast<double>(top) / lambda);
      for (int k = 0; k <= top; ++k) {
        ladder.levels[k] = g_min + (g_max - g_min) * (1.0 - std::exp(-k / lambda)) / denom;
      }
      // Pin the endpoint; the ratio is exactly 1 at k = top anyway.
      ladder.levels[top] = g_max;
      break;
    }
    case LadderModel::table:
      throw ConfigError("ladder: use ladder_from_table for table ladders");
  }
  // Extreme curvature can collapse adjacent levels at double precision,
  // which would break the 101-state weight lattice.
  for (int k = 1; k <= top; ++k) {
    if (!(ladder.levels[k] > ladder.levels[k - 1])) {
      throw ConfigError("ladder: levels collide (lambda too small)");
    }
  }
  return ladder;
}

ConductanceLadder ladder_from_table(std::vector<double> levels) {
  if (levels.size() != ConductanceLadder::kLevels) {
    throw ConfigError("ladder table must contain exactly " +
                      std::to_string(ConductanceLadder::kLevels) + " levels");
  }
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (!(levels[k] > levels[k - 1])) {
      throw ConfigError("ladder table must be strictly increasing (violated at index " +
                        std::to_string(k) + ")");
    }
  }
  if (!(levels.front() >= 0.0)) throw ConfigError("ladder levels must be >= 0");
  ConductanceLadder ladder;
  ladder.model = LadderModel::table;
  ladder.g_min = levels.front();
  ladder.g_max = levels.back();
  ladder.lambda = 0.0;
  ladder.levels = std::move(levels);
  return ladder;
}

std::string to_string(LadderModel model) {
  switch (model) {
    case LadderModel::linear: return "linear";
    case LadderModel::saturating_exp: return "saturating";
    case LadderModel::table: return "table";
  }
  return "?";
}

LadderModel ladder_model_from_string(const std::string& name) {
  if (name == "linear") return LadderModel::linear;
  if (name == "saturating") return LadderModel::saturating_exp;
  if (name == "table") return LadderModel::table;
  throw ConfigError("unknown ladder model: " + name);
}

}  // namespace ttfsim
