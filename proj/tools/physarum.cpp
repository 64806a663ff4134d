// physarum: experiment runner, oracle front end and scene tools.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "physarum/experiments.hpp"
#include "physarum/geometry.hpp"
#include "physarum/pgm.hpp"
#include "physarum/render.hpp"
#include "physarum/report.hpp"
#include "physarum/scene_io.hpp"
#include "physarum/scenes.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace physarum;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Accepts [[x,y],...], [{"x":..,"y":..},...] or {"sites": <either>}.
SiteSet read_sites(const fs::path& p) {
  json doc = json::parse(slurp(p));
  if (doc.is_object()) {
    if (!doc.contains("sites")) throw std::runtime_error("sites document needs a \"sites\" array");
    doc = doc["sites"];
  }
  if (!doc.is_array()) throw std::runtime_error("sites must be an array");
  SiteSet out;
  for (const auto& s : doc) {
    if (s.is_array() && s.size() == 2) {
      out.push_back({s[0].get<double>(), s[1].get<double>()});
    } else if (s.is_object()) {
      out.push_back({s.at("x").get<double>(), s.at("y").get<double>()});
    } else {
      throw std::runtime_error("each site must be [x, y] or {\"x\", \"y\"}");
    }
  }
  return out;
}

json graph_json(const PlanarGraph& g) {
  json nodes = json::array(), edges = json::array();
  for (Point p : g.nodes) nodes.push_back({p.x, p.y});
  for (auto [a, b] : g.edges) edges.push_back({a, b});
  return {{"nodes", nodes}, {"edges", edges}, {"total_length", g.total_length()}};
}

void write_scene(const Scene& s, const fs::path& path, const std::optional<std::string>& mask) {
  json doc = scene_to_json(s);
  if (mask) {
    // nutrient comes from the mask image; only walls stay as rectangles
    doc["substrate"]["mask_image"] = *mask;
    doc["substrate"]["nutrient_rects"] = json::array();
    doc["substrate"]["default_nutrient"] = 0.0;
  }
  write_text(doc.dump(2) + "\n", path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physarum growth simulator with geometric oracles"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a named experiment");
  std::string experiment, scene_path, out_dir = "out", stop_name;
  std::uint64_t seed = 1;
  int ticks = 5000;
  bool report_only = false;
  run->add_option("experiment", experiment, "voronoi | delaunay | spanning_tree | continuation | maze | substrate_shape | phase_space")
      ->required();
  run->add_option("--scene", scene_path, "scene document (built-in scene when omitted)");
  run->add_option("--seed", seed, "64-bit seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--ticks", ticks, "tick budget")->check(CLI::PositiveNumber);
  run->add_option("--stop", stop_name, "max_ticks | all_sources_colonized | single_zone_remaining | connected | waves_settled");
  run->add_flag("--report-only", report_only, "skip rasters and SVGs");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "evaluate a geometric oracle on a site set");
  std::string oracle_kind, sites_path, oracle_out;
  double beta = 1.0;
  int width = 256, height = 256;
  double cell_size = 1.0;
  oracle->add_option("kind", oracle_kind, "voronoi | delaunay | mst | beta")->required()
      ->check(CLI::IsMember({"voronoi", "delaunay", "mst", "beta"}));
  oracle->add_option("--sites", sites_path, "JSON site list (millimetres)")->required()->check(CLI::ExistingFile);
  oracle->add_option("--beta", beta, "lune parameter, >= 1");
  oracle->add_option("--width", width, "voronoi raster width in cells");
  oracle->add_option("--height", height, "voronoi raster height in cells");
  oracle->add_option("--cell-size", cell_size, "millimetres per cell");
  oracle->add_option("--out", oracle_out, "write the raster (PGM) or graph (SVG) here");

  // validate
  auto* validate = app.add_subcommand("validate", "parse and check a scene document");
  std::string validate_path;
  validate->add_option("--scene", validate_path, "scene document")->required();

  // scenes
  auto* dump = app.add_subcommand("scenes", "write the built-in scenes as documents");
  std::string dump_dir = ".";
  std::uint64_t dump_seed = 1;
  dump->add_option("--out", dump_dir, "root directory (scenes/ and data/ are created)");
  dump->add_option("--seed", dump_seed, "seed for the random site layouts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentSpec spec;
      spec.name = parse_experiment(experiment);
      spec.seed = seed;
      spec.output_dir = out_dir;
      spec.max_ticks = ticks;
      spec.report_only = report_only;
      if (!stop_name.empty()) spec.stop = parse_stop(stop_name);
      if (!scene_path.empty()) spec.scene = load_scene(scene_path);
      const RunReport r = run_experiment(spec);
      std::cout << emit_report(r);
      return exit_status(r);
    }
    if (*oracle) {
      const SiteSet sites = read_sites(sites_path);
      if (oracle_kind == "voronoi") {
        const GridSpec grid{width, height, cell_size};
        validate_grid(grid);
        const RasterPartition p = voronoi_raster(sites, grid);
        if (!oracle_out.empty()) render_raster(p, oracle_out);
        std::cout << canonical_json({{"width", width}, {"height", height}, {"boundary_cells", p.boundary_count()}});
        return 0;
      }
      PlanarGraph g;
      if (oracle_kind == "delaunay") {
        g = delaunay(sites);
      } else if (oracle_kind == "mst") {
        g = euclidean_mst(sites);
      } else {
        g = beta_skeleton(sites, beta);
      }
      if (!oracle_out.empty()) write_text(graph_svg(PlanarGraph{}, width * cell_size, height * cell_size, &g), oracle_out);
      std::cout << canonical_json(graph_json(g));
      return 0;
    }
    if (*validate) {
      const Scene s = load_scene(validate_path);
      std::cout << "ok " << s.grid.width << "x" << s.grid.height << ", " << s.sources.size() << " sources, "
                << s.inoculation_sites.size() << " inoculation sites\n";
      return 0;
    }
    if (*dump) {
      const fs::path root = dump_dir;
      fs::create_directories(root / "scenes");
      fs::create_directories(root / "data");
      const GreyImage mask = scenes::man_silhouette();
      write_pgm(mask, (root / "data" / "man_mask.pgm").string());
      write_scene(scenes::voronoi(dump_seed), root / "scenes" / "voronoi.json", std::nullopt);
      write_scene(scenes::delaunay(dump_seed), root / "scenes" / "delaunay.json", std::nullopt);
      write_scene(scenes::spanning_tree(dump_seed), root / "scenes" / "spanning_tree.json", std::nullopt);
      write_scene(scenes::continuation(dump_seed), root / "scenes" / "continuation.json", std::nullopt);
      write_scene(scenes::maze(dump_seed), root / "scenes" / "maze.json", std::nullopt);
      write_scene(scenes::substrate_shape(dump_seed, mask), root / "scenes" / "substrate_shape.json",
                  std::string("../data/man_mask.pgm"));
      write_scene(scenes::self_avoidance(dump_seed), root / "scenes" / "self_avoidance.json", std::nullopt);
      return 0;
    }
  } catch (const SceneError& e) {
    std::cerr << "scene error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
