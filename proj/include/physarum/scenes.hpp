#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "physarum/environment.hpp"
#include "physarum/geometry.hpp"
#include "physarum/pgm.hpp"
#include "physarum/rng.hpp"

// Built-in desk-scale scenes, one per experiment. All of them fit in 256 x 256.

namespace physarum::scenes {

inline Scene blank(int w, int h, double nutrient) {
  Scene s;
  s.grid = {w, h, 1.0};
  validate_grid(s.grid);
  s.substrate.nutrient = Grid<double>(s.grid, nutrient);
  s.substrate.wall = Grid<std::uint8_t>(s.grid, 0);
  return s;
}

inline StimulusSource attractant(Cell c, double strength = 1.0) {
  StimulusSource src;
  src.position = c;
  src.kind = Species::Attractant;
  src.strength = strength;
  return src;
}

/// `count` cells at least `min_sep` apart and `margin` away from the border.
inline std::vector<Cell> random_sites(int w, int h, int count, std::uint64_t seed, int margin = 16, double min_sep = 24.0) {
  SeqRng rng(seed, 0x73697465);
  std::vector<Cell> out;
  for (int attempt = 0; static_cast<int>(out.size()) < count; ++attempt) {
    if (attempt > 100000) throw std::runtime_error("random_sites: cannot place sites");
    const Cell c{margin + static_cast<int>(rng.below(static_cast<std::uint64_t>(w - 2 * margin))),
                 margin + static_cast<int>(rng.below(static_cast<std::uint64_t>(h - 2 * margin)))};
    bool ok = true;
    for (Cell o : out) ok = ok && std::hypot(c.x - o.x, c.y - o.y) >= min_sep;
    if (ok) out.push_back(c);
  }
  return out;
}

inline Scene voronoi(std::uint64_t seed) {
  Scene s = blank(256, 256, 1.0);
  s.comment = "five random inoculation sites on uniform nutrient";
  s.inoculation_sites = random_sites(256, 256, 5, seed);
  s.params.seed = seed;
  return s;
}

/// Same sites as voronoi(seed), each also a food source, on bare substrate.
inline Scene delaunay(std::uint64_t seed) {
  Scene s = blank(256, 256, 0.0);
  s.comment = "five random sites, each inoculated and baited, on non-nutrient substrate";
  s.inoculation_sites = random_sites(256, 256, 5, seed);
  for (Cell c : s.inoculation_sites) s.sources.push_back(attractant(c));
  s.params.seed = seed;
  return s;
}

inline Scene spanning_tree(std::uint64_t seed) {
  Scene s = blank(256, 256, 0.0);
  s.comment = "approximate layout: one inoculation in the south, five pills to the north (positions are not given exactly)";
  s.inoculation_sites = {{128, 228}};
  for (Cell c : std::vector<Cell>{{128, 176}, {84, 132}, {172, 132}, {70, 64}, {186, 60}}) s.sources.push_back(attractant(c));
  s.params.seed = seed;
  return s;
}

inline Scene continuation(std::uint64_t seed, bool enabled = true) {
  Scene s = blank(256, 256, 0.0);
  s.comment = "inoculation and two pills on a line";
  s.inoculation_sites = {{40, 128}};
  s.sources = {attractant({128, 128}), attractant({216, 128})};
  s.params.seed = seed;
  s.params.continuation = enabled;
  return s;
}

/// Walls everywhere the maze is not passable; inoculation at the entrance
/// room, food in the central chamber.
inline Scene maze_scene(const MazeGrid& m, std::uint64_t seed) {
  Scene s = blank(m.passable.width(), m.passable.height(), 0.0);
  s.comment = "perfect maze with food in the central chamber";
  for (int y = 0; y < s.grid.height; ++y)
    for (int x = 0; x < s.grid.width; ++x)
      if (!m.open({x, y})) s.substrate.set_wall({x, y});
  s.inoculation_sites = {m.start};
  s.sources = {attractant(m.goal)};
  s.params.seed = seed;
  return s;
}

inline Scene maze(std::uint64_t seed) { return maze_scene(generate_perfect_maze(15, 15, seed), seed); }

/// MazeGrid view of a scene: passable = non-wall, start = first inoculation
/// site, goal = first source.
inline MazeGrid maze_of(const Scene& s) {
  if (s.inoculation_sites.empty() || s.sources.empty()) throw std::invalid_argument("maze scene needs an inoculation site and a source");
  MazeGrid m{Grid<std::uint8_t>(s.grid, 0), s.inoculation_sites.front(), s.sources.front().position};
  for (int y = 0; y < s.grid.height; ++y)
    for (int x = 0; x < s.grid.width; ++x) m.passable[Cell{x, y}] = s.substrate.is_wall({x, y}) ? 0 : 1;
  return m;
}

/// Closed corridor three cells wide with a consumable food at the far end.
inline Scene self_avoidance(std::uint64_t seed) {
  Scene s = blank(256, 32, 0.0);
  s.comment = "corridor with one depleting food source";
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 256; ++x)
      if (y < 14 || y > 16 || x < 2 || x > 253) s.substrate.set_wall({x, y});
  s.inoculation_sites = {{6, 15}};
  StimulusSource food = attractant({248, 15});
  food.consumable = true;
  food.remaining_mass = 600.0;  // outlasts the ~500 ticks of emission before the tip arrives
  s.sources = {food};
  s.params.seed = seed;
  return s;
}

namespace detail {

inline bool in_rect(int x, int y, int x0, int y0, int x1, int y1) { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }

}  // namespace detail

/// Stylized human silhouette: 255 inside, 0 outside.
inline GreyImage man_silhouette(int w = 256, int h = 256) {
  GreyImage img{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0)};
  const double sx = w / 256.0, sy = h / 256.0;
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const int x = static_cast<int>(px / sx), y = static_cast<int>(py / sy);
      const bool head = std::hypot(x - 128, y - 62) <= 18.0;
      const bool neck = detail::in_rect(x, y, 120, 78, 136, 88);
      const bool torso = detail::in_rect(x, y, 100, 86, 156, 160);
      const bool shoulders = detail::in_rect(x, y, 72, 86, 184, 100);
      const bool arms = detail::in_rect(x, y, 72, 86, 86, 156) || detail::in_rect(x, y, 170, 86, 184, 156);
      const bool legs = detail::in_rect(x, y, 102, 160, 124, 232) || detail::in_rect(x, y, 132, 160, 154, 232);
      if (head || neck || torso || shoulders || arms || legs)
        img.pixels[static_cast<std::size_t>(py) * static_cast<std::size_t>(w) + static_cast<std::size_t>(px)] = 255;
    }
  }
  return img;
}

/// Nutrient = 1 inside the mask (pixel >= 128), 0 outside. Two baits sit at
/// the ends of a walled chamber above the topmost mask cell, reachable only
/// through a one-cell channel, so growth leaving the shape has to fork.
inline Scene substrate_shape(std::uint64_t seed, const GreyImage& mask) {
  Scene s = blank(mask.width, mask.height, 0.0);
  s.comment = "human-silhouette nutrient mask; two baits in a closed chamber above the head";
  Cell top{-1, -1};
  for (int y = 0; y < mask.height && top.x < 0; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y) >= 128) {
        s.substrate.nutrient[Cell{x, y}] = 1.0;
        if (top.x < 0) top = {x, y};
      }
  for (int y = top.y + 1; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) s.substrate.nutrient[Cell{x, y}] = mask.at(x, y) >= 128 ? 1.0 : 0.0;
  // channel from just above the head up to the chamber row
  const int cy = top.y - 14, half = std::min(28, mask.width / 2 - 4);
  if (cy < 2) throw std::invalid_argument("substrate_shape: mask leaves no room above the shape");
  for (int y = cy + 2; y < top.y; ++y) {
    s.substrate.set_wall({top.x - 1, y});
    s.substrate.set_wall({top.x + 1, y});
  }
  for (int x = top.x - half - 1; x <= top.x + half + 1; ++x) {
    s.substrate.set_wall({x, cy - 1});
    if (x != top.x) s.substrate.set_wall({x, cy + 1});
  }
  s.substrate.set_wall({top.x - half - 1, cy});
  s.substrate.set_wall({top.x + half + 1, cy});
  s.inoculation_sites = {{mask.width / 2, mask.height * 120 / 256}};
  s.sources = {attractant({top.x - half + 1, cy}), attractant({top.x + half - 1, cy})};
  s.params.seed = seed;
  return s;
}

inline Scene substrate_shape(std::uint64_t seed) { return substrate_shape(seed, man_silhouette()); }

}  // namespace physarum::scenes
