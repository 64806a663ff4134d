#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <limits>
#include <string>

namespace physarum {

/// Growth-engine knobs. All of them are exposed in the scene document under "engine".
struct EngineParams {
  double wave_speed = 1.0;          // cells per tick, (0, 1]
  double nutrient_threshold = 0.5;  // cell is nutrient-rich iff nutrient >= threshold
  double branch_ratio = 0.9;        // (0, 1]
  double noise_amplitude = 0.05;
  double self_avoid_penalty = 2.0;
  double suppression_gain = 0.02;
  double activity_floor = 0.05;
  bool continuation = false;
  int max_zones = 64;
  std::uint64_t seed = 0;

  // Heading-persistence weight in the zone score.
  double momentum = 0.2;
  double attractant_weight = 1.0;
  double repellent_weight = 1.0;
  // Depletion rate of a colonized consumable source, as a multiple of its strength.
  double feeding_rate = 10.0;
  // Ticks a zone must travel after a branch event before it may branch again.
  int branch_cooldown = 8;
  // Upper bound on zone activity. With suppression_gain g a zone survives a
  // dominant neighbour only while its relative stimulus is >= g * activity_cap.
  double activity_cap = 37.5;

  friend bool operator==(const EngineParams&, const EngineParams&) = default;
};

/// Returns an empty string when valid, otherwise the name of the first bad field.
inline std::string engine_params_error(const EngineParams& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(p.wave_speed > 0.0 && p.wave_speed <= 1.0)) return "wave_speed";
  if (!(p.nutrient_threshold >= 0.0 && p.nutrient_threshold <= 1.0)) return "nutrient_threshold";
  if (!(p.branch_ratio > 0.0 && p.branch_ratio <= 1.0)) return "branch_ratio";
  if (!(p.noise_amplitude >= 0.0 && finite(p.noise_amplitude))) return "noise_amplitude";
  if (!(p.self_avoid_penalty >= 0.0 && finite(p.self_avoid_penalty))) return "self_avoid_penalty";
  if (!(p.suppression_gain >= 0.0 && finite(p.suppression_gain))) return "suppression_gain";
  if (!(p.activity_floor >= 0.0 && finite(p.activity_floor))) return "activity_floor";
  if (p.max_zones < 1) return "max_zones";
  if (!(p.momentum >= 0.0 && finite(p.momentum))) return "momentum";
  if (!(p.attractant_weight >= 0.0 && finite(p.attractant_weight))) return "attractant_weight";
  if (!(p.repellent_weight >= 0.0 && finite(p.repellent_weight))) return "repellent_weight";
  if (!(p.feeding_rate >= 0.0 && finite(p.feeding_rate))) return "feeding_rate";
  if (p.branch_cooldown < 0) return "branch_cooldown";
  if (!(p.activity_cap > 0.0 && finite(p.activity_cap))) return "activity_cap";
  return {};
}

}  // namespace physarum
