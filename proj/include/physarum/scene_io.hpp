#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "physarum/environment.hpp"
#include "physarum/pgm.hpp"

namespace physarum {

/// Scene document error. `path` is a JSON-pointer-like location such as
/// "sources[2].x" naming the offending field.
class SceneError : public std::runtime_error {
 public:
  enum class Kind { Schema, Semantic };

  SceneError(Kind kind, std::string path, const std::string& message)
      : std::runtime_error((kind == Kind::Schema ? "schema violation at " : "semantic violation at ") +
                           path + ": " + message),
        kind_(kind), path_(std::move(path)) {}

  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

namespace detail {

using nlohmann::json;

inline void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw SceneError(SceneError::Kind::Schema, path, "expected an object");
}

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw SceneError(SceneError::Kind::Schema, path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline const json& require(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SceneError(SceneError::Kind::Schema, join(path, key), "missing required field");
  return *it;
}

inline double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SceneError(SceneError::Kind::Schema, path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SceneError(SceneError::Kind::Schema, path, "expected a finite number");
  return v;
}

inline int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SceneError(SceneError::Kind::Schema, path, "expected an integer");
  return j.get<int>();
}

inline bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw SceneError(SceneError::Kind::Schema, path, "expected a boolean");
  return j.get<bool>();
}

inline void read_number(const json& obj, const std::string& path, const char* key, double& out) {
  if (auto it = obj.find(key); it != obj.end()) out = get_number(*it, join(path, key));
}

inline void read_int(const json& obj, const std::string& path, const char* key, int& out) {
  if (auto it = obj.find(key); it != obj.end()) out = get_int(*it, join(path, key));
}

inline void read_bool(const json& obj, const std::string& path, const char* key, bool& out) {
  if (auto it = obj.find(key); it != obj.end()) out = get_bool(*it, join(path, key));
}

struct Rect {
  int x, y, w, h;
};

inline Rect read_rect(const json& j, const std::string& path, bool with_value, double* value) {
  expect_object(j, path);
  if (with_value) {
    reject_unknown(j, path, {"x", "y", "w", "h", "value"});
  } else {
    reject_unknown(j, path, {"x", "y", "w", "h"});
  }
  Rect r{get_int(require(j, path, "x"), join(path, "x")), get_int(require(j, path, "y"), join(path, "y")),
         get_int(require(j, path, "w"), join(path, "w")), get_int(require(j, path, "h"), join(path, "h"))};
  if (r.w < 0 || r.h < 0) throw SceneError(SceneError::Kind::Semantic, path, "negative rectangle size");
  if (with_value) {
    *value = get_number(require(j, path, "value"), join(path, "value"));
    if (*value < 0.0 || *value > 1.0)
      throw SceneError(SceneError::Kind::Semantic, join(path, "value"), "nutrient must lie in [0,1]");
  }
  return r;
}

inline DiffusionParams read_diffusion(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"D", "lambda"});
  DiffusionParams d;
  read_number(j, path, "D", d.D);
  read_number(j, path, "lambda", d.lambda);
  if (d.D < 0.0) throw SceneError(SceneError::Kind::Semantic, join(path, "D"), "must be >= 0");
  if (d.D * 1.0 > 0.25)
    throw SceneError(SceneError::Kind::Semantic, join(path, "D"),
                     "stability violation: D*dt = " + std::to_string(d.D) + " exceeds 0.25");
  if (d.lambda < 0.0 || d.lambda > 1.0)
    throw SceneError(SceneError::Kind::Semantic, join(path, "lambda"), "must lie in [0,1]");
  return d;
}

inline EngineParams read_engine(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path,
                 {"wave_speed", "nutrient_threshold", "branch_ratio", "noise_amplitude", "self_avoid_penalty",
                  "suppression_gain", "activity_floor", "continuation", "max_zones", "seed", "momentum",
                  "attractant_weight", "repellent_weight", "feeding_rate", "branch_cooldown", "activity_cap"});
  EngineParams p;
  read_number(j, path, "wave_speed", p.wave_speed);
  read_number(j, path, "nutrient_threshold", p.nutrient_threshold);
  read_number(j, path, "branch_ratio", p.branch_ratio);
  read_number(j, path, "noise_amplitude", p.noise_amplitude);
  read_number(j, path, "self_avoid_penalty", p.self_avoid_penalty);
  read_number(j, path, "suppression_gain", p.suppression_gain);
  read_number(j, path, "activity_floor", p.activity_floor);
  read_bool(j, path, "continuation", p.continuation);
  read_int(j, path, "max_zones", p.max_zones);
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
      throw SceneError(SceneError::Kind::Schema, join(path, "seed"), "expected an unsigned integer");
    p.seed = it->get<std::uint64_t>();
  }
  read_number(j, path, "momentum", p.momentum);
  read_number(j, path, "attractant_weight", p.attractant_weight);
  read_number(j, path, "repellent_weight", p.repellent_weight);
  read_number(j, path, "feeding_rate", p.feeding_rate);
  read_int(j, path, "branch_cooldown", p.branch_cooldown);
  read_number(j, path, "activity_cap", p.activity_cap);
  if (const std::string bad = engine_params_error(p); !bad.empty())
    throw SceneError(SceneError::Kind::Semantic, join(path, bad), "value out of range");
  return p;
}

}  // namespace detail

/// Parses and validates a scene document. Relative mask paths resolve against `base_dir`.
inline Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir = {}) {
  using detail::json;
  using detail::join;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SceneError(SceneError::Kind::Schema, "$", std::string("malformed JSON: ") + e.what());
  }
  detail::expect_object(doc, "$");
  detail::reject_unknown(doc, "", {"comment", "grid", "substrate", "sources", "inoculation", "diffusion", "engine"});

  Scene scene;
  if (auto it = doc.find("comment"); it != doc.end()) {
    if (!it->is_string()) throw SceneError(SceneError::Kind::Schema, "comment", "expected a string");
    scene.comment = it->get<std::string>();
  }

  const json& grid = detail::require(doc, "", "grid");
  detail::expect_object(grid, "grid");
  detail::reject_unknown(grid, "grid", {"width", "height", "cell_size_mm"});
  scene.grid.width = detail::get_int(detail::require(grid, "grid", "width"), "grid.width");
  scene.grid.height = detail::get_int(detail::require(grid, "grid", "height"), "grid.height");
  detail::read_number(grid, "grid", "cell_size_mm", scene.grid.cell_size);
  if (scene.grid.width < 8) throw SceneError(SceneError::Kind::Semantic, "grid.width", "must be >= 8");
  if (scene.grid.height < 8) throw SceneError(SceneError::Kind::Semantic, "grid.height", "must be >= 8");
  if (!(scene.grid.cell_size > 0.0)) throw SceneError(SceneError::Kind::Semantic, "grid.cell_size_mm", "must be > 0");
  if (scene.grid.cell_count() > max_grid_cells())
    throw SceneError(SceneError::Kind::Semantic, "grid", "cell count exceeds the configured maximum");

  double default_nutrient = 0.0;
  const json empty_obj = json::object();
  const json& sub = doc.contains("substrate") ? doc["substrate"] : empty_obj;
  detail::expect_object(sub, "substrate");
  detail::reject_unknown(sub, "substrate", {"default_nutrient", "nutrient_rects", "wall_rects", "mask_image"});
  detail::read_number(sub, "substrate", "default_nutrient", default_nutrient);
  if (default_nutrient < 0.0 || default_nutrient > 1.0)
    throw SceneError(SceneError::Kind::Semantic, "substrate.default_nutrient", "must lie in [0,1]");
  scene.substrate = SubstrateMap(scene.grid, default_nutrient);

  if (auto it = sub.find("mask_image"); it != sub.end() && !it->is_null()) {
    if (!it->is_string()) throw SceneError(SceneError::Kind::Schema, "substrate.mask_image", "expected a path string");
    std::filesystem::path p = it->get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    GreyImage img;
    try {
      img = read_pgm(p.string());
    } catch (const std::exception& e) {
      throw SceneError(SceneError::Kind::Semantic, "substrate.mask_image", e.what());
    }
    if (img.width != scene.grid.width || img.height != scene.grid.height)
      throw SceneError(SceneError::Kind::Semantic, "substrate.mask_image", "mask dimensions differ from grid");
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) scene.substrate.nutrient[Cell{x, y}] = img.at(x, y) / 255.0;
  }

  auto for_rect = [&](const detail::Rect& r, auto&& fn) {
    for (int y = std::max(0, r.y); y < std::min(scene.grid.height, r.y + r.h); ++y)
      for (int x = std::max(0, r.x); x < std::min(scene.grid.width, r.x + r.w); ++x) fn(Cell{x, y});
  };
  if (auto it = sub.find("nutrient_rects"); it != sub.end()) {
    if (!it->is_array()) throw SceneError(SceneError::Kind::Schema, "substrate.nutrient_rects", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "substrate.nutrient_rects[" + std::to_string(i) + "]";
      double value = 0.0;
      const detail::Rect r = detail::read_rect((*it)[i], path, true, &value);
      for_rect(r, [&](Cell c) { scene.substrate.nutrient[c] = value; });
    }
  }
  if (auto it = sub.find("wall_rects"); it != sub.end()) {
    if (!it->is_array()) throw SceneError(SceneError::Kind::Schema, "substrate.wall_rects", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "substrate.wall_rects[" + std::to_string(i) + "]";
      const detail::Rect r = detail::read_rect((*it)[i], path, false, nullptr);
      for_rect(r, [&](Cell c) { scene.substrate.set_wall(c); });
    }
  }

  if (auto it = doc.find("sources"); it != doc.end()) {
    if (!it->is_array()) throw SceneError(SceneError::Kind::Schema, "sources", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "sources[" + std::to_string(i) + "]";
      const json& s = (*it)[i];
      detail::expect_object(s, path);
      detail::reject_unknown(s, path, {"x", "y", "kind", "strength", "consumable", "mass"});
      StimulusSource src;
      src.position.x = detail::get_int(detail::require(s, path, "x"), join(path, "x"));
      src.position.y = detail::get_int(detail::require(s, path, "y"), join(path, "y"));
      if (auto k = s.find("kind"); k != s.end()) {
        if (!k->is_string()) throw SceneError(SceneError::Kind::Schema, join(path, "kind"), "expected a string");
        const std::string kind = k->get<std::string>();
        if (kind == "attractant") {
          src.kind = Species::Attractant;
        } else if (kind == "repellent") {
          src.kind = Species::Repellent;
        } else {
          throw SceneError(SceneError::Kind::Schema, join(path, "kind"), "expected attractant or repellent");
        }
      }
      detail::read_number(s, path, "strength", src.strength);
      detail::read_bool(s, path, "consumable", src.consumable);
      detail::read_number(s, path, "mass", src.remaining_mass);
      if (src.strength < 0.0) throw SceneError(SceneError::Kind::Semantic, join(path, "strength"), "must be >= 0");
      if (src.remaining_mass < 0.0) throw SceneError(SceneError::Kind::Semantic, join(path, "mass"), "must be >= 0");
      if (!scene.grid.contains(src.position))
        throw SceneError(SceneError::Kind::Semantic, path, "source position outside grid");
      if (scene.substrate.is_wall(src.position))
        throw SceneError(SceneError::Kind::Semantic, path, "source placed on a wall");
      scene.sources.push_back(src);
    }
  }

  const json& inoc = detail::require(doc, "", "inoculation");
  if (!inoc.is_array()) throw SceneError(SceneError::Kind::Schema, "inoculation", "expected an array");
  if (inoc.empty()) throw SceneError(SceneError::Kind::Semantic, "inoculation", "at least one site required");
  for (std::size_t i = 0; i < inoc.size(); ++i) {
    const std::string path = "inoculation[" + std::to_string(i) + "]";
    detail::expect_object(inoc[i], path);
    detail::reject_unknown(inoc[i], path, {"x", "y"});
    Cell c{detail::get_int(detail::require(inoc[i], path, "x"), join(path, "x")),
           detail::get_int(detail::require(inoc[i], path, "y"), join(path, "y"))};
    if (!scene.grid.contains(c)) throw SceneError(SceneError::Kind::Semantic, path, "inoculation site outside grid");
    if (scene.substrate.is_wall(c)) throw SceneError(SceneError::Kind::Semantic, path, "inoculation site on a wall");
    for (Cell prev : scene.inoculation_sites)
      if (prev == c) throw SceneError(SceneError::Kind::Semantic, path, "duplicate inoculation site");
    scene.inoculation_sites.push_back(c);
  }

  if (auto it = doc.find("diffusion"); it != doc.end()) {
    detail::expect_object(*it, "diffusion");
    detail::reject_unknown(*it, "diffusion", {"attractant", "repellent"});
    bool repellent_given = false;
    if (auto a = it->find("attractant"); a != it->end())
      scene.attractant_diffusion = detail::read_diffusion(*a, "diffusion.attractant");
    if (auto r = it->find("repellent"); r != it->end()) {
      scene.repellent_diffusion = detail::read_diffusion(*r, "diffusion.repellent");
      repellent_given = true;
    }
    if (!repellent_given) scene.repellent_diffusion = scene.attractant_diffusion;
  }

  if (auto it = doc.find("engine"); it != doc.end()) scene.params = detail::read_engine(*it, "engine");
  return scene;
}

inline Scene load_scene(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scene " + path.string());
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_scene(text, path.parent_path());
}

/// Serializes a scene. The substrate is written as run-length nutrient rows
/// folded into rectangles, so documents round-trip through parse_scene.
inline nlohmann::json scene_to_json(const Scene& s) {
  using nlohmann::json;
  json doc;
  if (!s.comment.empty()) doc["comment"] = s.comment;
  doc["grid"] = {{"width", s.grid.width}, {"height", s.grid.height}, {"cell_size_mm", s.grid.cell_size}};

  // Background value is the most common nutrient level among non-wall cells.
  double background = 0.0;
  {
    std::size_t rich = 0, poor = 0;
    for (std::size_t i = 0; i < s.substrate.nutrient.size(); ++i) {
      if (s.substrate.wall.at(i)) continue;
      (s.substrate.nutrient.at(i) == 0.0 ? poor : rich)++;
    }
    if (rich > poor) {
      // pick the value of the first non-zero cell
      for (std::size_t i = 0; i < s.substrate.nutrient.size(); ++i)
        if (!s.substrate.wall.at(i) && s.substrate.nutrient.at(i) != 0.0) {
          background = s.substrate.nutrient.at(i);
          break;
        }
    }
  }
  json nutrient_rects = json::array();
  json wall_rects = json::array();
  for (int y = 0; y < s.grid.height; ++y) {
    int x = 0;
    while (x < s.grid.width) {
      const Cell c{x, y};
      if (s.substrate.is_wall(c)) {
        int end = x;
        while (end < s.grid.width && s.substrate.is_wall(Cell{end, y})) ++end;
        wall_rects.push_back({{"x", x}, {"y", y}, {"w", end - x}, {"h", 1}});
        x = end;
      } else if (s.substrate.nutrient[c] != background) {
        const double v = s.substrate.nutrient[c];
        int end = x;
        while (end < s.grid.width && !s.substrate.is_wall(Cell{end, y}) && s.substrate.nutrient[Cell{end, y}] == v)
          ++end;
        nutrient_rects.push_back({{"x", x}, {"y", y}, {"w", end - x}, {"h", 1}, {"value", v}});
        x = end;
      } else {
        ++x;
      }
    }
  }
  doc["substrate"] = {{"default_nutrient", background}, {"nutrient_rects", nutrient_rects}, {"wall_rects", wall_rects}};

  json sources = json::array();
  for (const auto& src : s.sources) {
    sources.push_back({{"x", src.position.x},
                       {"y", src.position.y},
                       {"kind", to_string(src.kind)},
                       {"strength", src.strength},
                       {"consumable", src.consumable},
                       {"mass", src.remaining_mass}});
  }
  doc["sources"] = sources;
  json inoc = json::array();
  for (Cell c : s.inoculation_sites) inoc.push_back({{"x", c.x}, {"y", c.y}});
  doc["inoculation"] = inoc;
  doc["diffusion"] = {{"attractant", {{"D", s.attractant_diffusion.D}, {"lambda", s.attractant_diffusion.lambda}}},
                      {"repellent", {{"D", s.repellent_diffusion.D}, {"lambda", s.repellent_diffusion.lambda}}}};
  const EngineParams& p = s.params;
  doc["engine"] = {{"wave_speed", p.wave_speed},
                   {"nutrient_threshold", p.nutrient_threshold},
                   {"branch_ratio", p.branch_ratio},
                   {"noise_amplitude", p.noise_amplitude},
                   {"self_avoid_penalty", p.self_avoid_penalty},
                   {"suppression_gain", p.suppression_gain},
                   {"activity_floor", p.activity_floor},
                   {"continuation", p.continuation},
                   {"max_zones", p.max_zones},
                   {"seed", p.seed},
                   {"momentum", p.momentum},
                   {"attractant_weight", p.attractant_weight},
                   {"repellent_weight", p.repellent_weight},
                   {"feeding_rate", p.feeding_rate},
                   {"branch_cooldown", p.branch_cooldown},
                   {"activity_cap", p.activity_cap}};
  return doc;
}

}  // namespace physarum
