#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "physarum/grid.hpp"
#include "physarum/params.hpp"

namespace physarum {

enum class Species : std::uint8_t { Attractant, Repellent };

inline const char* to_string(Species s) { return s == Species::Attractant ? "attractant" : "repellent"; }

/// Per-cell nutrient level and impassable walls.
struct SubstrateMap {
  Grid<double> nutrient;
  Grid<std::uint8_t> wall;

  SubstrateMap() = default;
  explicit SubstrateMap(const GridSpec& g, double default_nutrient = 0.0)
      : nutrient(g, default_nutrient), wall(g, 0) {}

  bool is_wall(Cell c) const { return wall[c] != 0; }
  bool passable(Cell c) const { return nutrient.contains(c) && wall[c] == 0; }

  void set_wall(Cell c) {
    wall[c] = 1;
    nutrient[c] = 0.0;
  }

  friend bool operator==(const SubstrateMap&, const SubstrateMap&) = default;
};

struct StimulusSource {
  Cell position;
  Species kind = Species::Attractant;
  double strength = 1.0;  // concentration units per tick
  bool consumable = false;
  double remaining_mass = 0.0;
  bool colonized = false;

  bool depleted() const { return consumable && remaining_mass <= 0.0; }

  friend bool operator==(const StimulusSource&, const StimulusSource&) = default;
};

struct ChemicalField {
  Grid<double> concentration;
  Species species = Species::Attractant;

  ChemicalField() = default;
  ChemicalField(const GridSpec& g, Species s) : concentration(g, 0.0), species(s) {}

  double operator[](Cell c) const { return concentration[c]; }
  double total() const {
    double sum = 0.0;
    for (double v : concentration.data()) sum += v;
    return sum;
  }

  friend bool operator==(const ChemicalField&, const ChemicalField&) = default;
};

struct DiffusionParams {
  double D = 0.2;         // cells^2 per tick
  double lambda = 0.01;   // decay fraction per tick

  friend bool operator==(const DiffusionParams&, const DiffusionParams&) = default;
};

struct Scene {
  GridSpec grid;
  SubstrateMap substrate;
  std::vector<StimulusSource> sources;
  std::vector<Cell> inoculation_sites;
  EngineParams params;
  DiffusionParams attractant_diffusion;
  DiffusionParams repellent_diffusion;
  std::string comment;

  const DiffusionParams& diffusion_for(Species s) const {
    return s == Species::Attractant ? attractant_diffusion : repellent_diffusion;
  }
  bool nutrient_rich(Cell c) const {
    return !substrate.is_wall(c) && substrate.nutrient[c] >= params.nutrient_threshold;
  }
};

/// One explicit 5-point diffusion step with no-flux walls and edges, followed
/// by multiplicative decay. Each cell reads only the previous grid, so the
/// result does not depend on evaluation order.
inline void diffuse_step_into(const ChemicalField& field, const SubstrateMap& substrate, double D,
                              double lambda, ChemicalField& out) {
  const Grid<double>& c = field.concentration;
  if (!c.same_shape(substrate.nutrient)) throw std::invalid_argument("diffuse_step: dimension mismatch");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("diffuse_step: lambda outside [0,1]");
  if (!(D >= 0.0 && D <= 0.25)) throw std::invalid_argument("diffuse_step: D outside stability bound");
  out.species = field.species;
  if (!out.concentration.same_shape(c)) out.concentration = Grid<double>(c.width(), c.height(), 0.0);

  const int w = c.width();
  const int h = c.height();
  const double keep = 1.0 - lambda;
  const auto& src = c.data();
  const auto& wall = substrate.wall.data();
  auto& dst = out.concentration.data();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                            static_cast<std::size_t>(x);
      if (wall[i]) {
        dst[i] = 0.0;
        continue;
      }
      const double ci = src[i];
      double flux = 0.0;
      // Fixed N, E, S, W order.
      if (y > 0 && !wall[i - static_cast<std::size_t>(w)]) flux += src[i - static_cast<std::size_t>(w)] - ci;
      if (x + 1 < w && !wall[i + 1]) flux += src[i + 1] - ci;
      if (y + 1 < h && !wall[i + static_cast<std::size_t>(w)]) flux += src[i + static_cast<std::size_t>(w)] - ci;
      if (x > 0 && !wall[i - 1]) flux += src[i - 1] - ci;
      const double v = (ci + D * flux) * keep;
      dst[i] = v > 0.0 ? v : 0.0;
    }
  }
}

inline ChemicalField diffuse_step(const ChemicalField& field, const SubstrateMap& substrate, double D,
                                  double lambda) {
  ChemicalField out;
  diffuse_step_into(field, substrate, D, lambda, out);
  return out;
}

/// Emits one source into `field` and updates its remaining mass. Returns the
/// amount deposited.
inline double deposit_source(ChemicalField& field, StimulusSource& s, double feeding_rate = 10.0) {
  if (s.kind != field.species) return 0.0;
  if (s.depleted()) return 0.0;
  double amount = s.strength;
  if (s.consumable) amount = std::min(amount, s.remaining_mass);
  field.concentration[s.position] += amount;
  if (s.consumable) {
    const double drain = s.colonized ? std::max(amount, feeding_rate * s.strength) : amount;
    s.remaining_mass = std::max(0.0, s.remaining_mass - drain);
  }
  return amount;
}

/// Deposits every source of the field's species.
inline void deposit_sources(ChemicalField& field, std::span<StimulusSource> sources,
                            double feeding_rate = 10.0) {
  for (StimulusSource& s : sources) deposit_source(field, s, feeding_rate);
}

struct StimulusWeights {
  double attractant = 1.0;
  double repellent = 1.0;
};

inline double stimulus_at(const ChemicalField& attractant, const ChemicalField& repellent,
                          StimulusWeights w, Cell cell) {
  if (!attractant.concentration.contains(cell) || !repellent.concentration.contains(cell))
    throw std::out_of_range("stimulus_at: cell outside grid");
  return w.attractant * attractant[cell] - w.repellent * repellent[cell];
}

}  // namespace physarum
