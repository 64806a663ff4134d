#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "physarum/engine.hpp"
#include "physarum/geometry.hpp"
#include "physarum/pgm.hpp"
#include "physarum/tube_graph.hpp"

namespace physarum {

// Raster value mapping:
//   Empty, Blocked          0
//   Front, Occupied         128 + owner mod 64
//   Tube                    255
//   AbandonedTube           64
//   partition boundary      255 (interior 0)
//   fields                  min-max normalized to 0..255, constant field -> 0

inline GreyImage occupancy_image(const PlasmodiumState& st) {
  const auto& occ = st.occupancy;
  GreyImage img{occ.width(), occ.height(), std::vector<std::uint8_t>(occ.size(), 0)};
  for (std::size_t i = 0; i < occ.size(); ++i) {
    const CellState& c = occ.at(i);
    switch (c.tag) {
      case Tag::Front:
      case Tag::Occupied: img.pixels[i] = static_cast<std::uint8_t>(128 + c.ref % 64); break;
      case Tag::Tube: img.pixels[i] = 255; break;
      case Tag::AbandonedTube: img.pixels[i] = 64; break;
      default: break;
    }
  }
  return img;
}

inline GreyImage partition_image(const RasterPartition& p) {
  GreyImage img{p.label.width(), p.label.height(), std::vector<std::uint8_t>(p.label.size(), 0)};
  for (std::size_t i = 0; i < p.label.size(); ++i)
    if (p.label.at(i) == RasterPartition::kBoundary) img.pixels[i] = 255;
  return img;
}

inline GreyImage field_image(const Grid<double>& f) {
  GreyImage img{f.width(), f.height(), std::vector<std::uint8_t>(f.size(), 0)};
  if (f.size() == 0) return img;
  const auto [lo, hi] = std::minmax_element(f.data().begin(), f.data().end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return img;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = (f.at(i) - *lo) / span * 255.0;
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(v + 0.5, 0.0, 255.0));
  }
  return img;
}

inline GreyImage field_image(const ChemicalField& f) { return field_image(f.concentration); }

inline void render_raster(const PlasmodiumState& st, const std::string& path) { write_pgm(occupancy_image(st), path); }
inline void render_raster(const RasterPartition& p, const std::string& path) { write_pgm(partition_image(p), path); }
inline void render_raster(const ChemicalField& f, const std::string& path) { write_pgm(field_image(f), path); }

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string svg_header(double width_mm, double height_mm) {
  const std::string w = svg_num(width_mm), h = svg_num(height_mm);
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + w +
         "mm\" height=\"" + h + "mm\" viewBox=\"0 0 " + w + " " + h + "\">\n";
}

inline void oracle_lines(std::string& out, const PlanarGraph& g) {
  out += "<g id=\"oracle\" stroke=\"#c0392b\" stroke-width=\"0.6\" fill=\"none\">\n";
  for (auto [a, b] : g.edges) {
    const Point p = g.nodes[static_cast<std::size_t>(a)], q = g.nodes[static_cast<std::size_t>(b)];
    out += "<line x1=\"" + svg_num(p.x) + "\" y1=\"" + svg_num(p.y) + "\" x2=\"" + svg_num(q.x) + "\" y2=\"" +
           svg_num(q.y) + "\"/>\n";
  }
  out += "</g>\n";
}

}  // namespace detail

/// Simulated tubes as polylines (abandoned ones dashed), optional oracle
/// edges as solid straight lines. Coordinates are millimetres.
inline std::string graph_svg(const TubeGraph& g, const GridSpec& grid, const PlanarGraph* overlay = nullptr) {
  std::string out = detail::svg_header(grid.width * grid.cell_size, grid.height * grid.cell_size);
  out += "<g id=\"sim\" stroke=\"#1a5276\" stroke-width=\"1.2\" fill=\"none\">\n";
  for (const auto& e : g.edges) {
    out += "<polyline";
    if (e.abandoned) out += " stroke-dasharray=\"3 2\"";
    out += " points=\"";
    for (std::size_t i = 0; i < e.polyline.size(); ++i) {
      const Point p = cell_center(grid, e.polyline[i]);
      if (i) out += ' ';
      out += detail::svg_num(p.x) + "," + detail::svg_num(p.y);
    }
    out += "\"/>\n";
  }
  out += "</g>\n";
  if (overlay) detail::oracle_lines(out, *overlay);
  out += "</svg>\n";
  return out;
}

/// A straight-line graph drawn in the simulated style (one two-point polyline per edge).
inline std::string graph_svg(const PlanarGraph& g, double width_mm, double height_mm, const PlanarGraph* overlay = nullptr) {
  std::string out = detail::svg_header(width_mm, height_mm);
  out += "<g id=\"sim\" stroke=\"#1a5276\" stroke-width=\"1.2\" fill=\"none\">\n";
  for (auto [a, b] : g.edges) {
    const Point p = g.nodes[static_cast<std::size_t>(a)], q = g.nodes[static_cast<std::size_t>(b)];
    out += "<polyline points=\"" + detail::svg_num(p.x) + "," + detail::svg_num(p.y) + " " + detail::svg_num(q.x) +
           "," + detail::svg_num(q.y) + "\"/>\n";
  }
  out += "</g>\n";
  if (overlay) detail::oracle_lines(out, *overlay);
  out += "</svg>\n";
  return out;
}

inline void write_text(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline void render_graph_svg(const TubeGraph& g, const GridSpec& grid, const PlanarGraph* overlay,
                             const std::string& path) {
  write_text(graph_svg(g, grid, overlay), path);
}

}  // namespace physarum
