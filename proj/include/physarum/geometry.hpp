#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "physarum/grid.hpp"
#include "physarum/predicates.hpp"
#include "physarum/rng.hpp"

namespace physarum {

/// Planar site set in millimetres; points must be pairwise distinct.
using SiteSet = std::vector<Point>;

inline void validate_sites(std::span<const Point> sites) {
  if (sites.empty()) throw std::invalid_argument("site set is empty");
  std::vector<Point> sorted(sites.begin(), sites.end());
  std::sort(sorted.begin(), sorted.end(), lex_less);
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1]) throw std::invalid_argument("site set contains duplicate points");
}

/// Centre of a raster cell in millimetres.
inline Point cell_center(const GridSpec& g, Cell c) {
  return {(c.x + 0.5) * g.cell_size, (c.y + 0.5) * g.cell_size};
}

/// Cell containing a point given in millimetres.
inline Cell cell_of(const GridSpec& g, Point p) {
  return {static_cast<int>(std::floor(p.x / g.cell_size)), static_cast<int>(std::floor(p.y / g.cell_size))};
}

// ---------------------------------------------------------------------------
// Raster Voronoi partition

struct RasterPartition {
  static constexpr std::int32_t kBoundary = -1;

  GridSpec grid;
  Grid<std::int32_t> label;  // site index or kBoundary

  bool is_boundary(Cell c) const { return label[c] == kBoundary; }
  std::size_t boundary_count() const {
    return static_cast<std::size_t>(std::count(label.data().begin(), label.data().end(), kBoundary));
  }
};

/// Half a cell diagonal.
inline double default_tie_tolerance(const GridSpec& g) { return g.cell_size * kSqrt2 / 2.0; }

/// Brute-force nearest-site labelling of cell centres. A cell is Boundary when
/// its two nearest sites are within `tie_tolerance` of each other.
inline RasterPartition voronoi_raster(std::span<const Point> sites, const GridSpec& grid,
                                      std::optional<double> tie_tolerance = std::nullopt) {
  if (sites.empty()) throw std::invalid_argument("voronoi_raster: empty site set");
  const double eps = tie_tolerance.value_or(default_tie_tolerance(grid));
  RasterPartition out{grid, Grid<std::int32_t>(grid, 0)};
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      const Point c = cell_center(grid, {x, y});
      double best = std::numeric_limits<double>::infinity();
      double second = std::numeric_limits<double>::infinity();
      std::int32_t owner = 0;
      for (std::size_t i = 0; i < sites.size(); ++i) {
        const double d = distance(c, sites[i]);
        if (d < best) {
          second = best;
          best = d;
          owner = static_cast<std::int32_t>(i);
        } else if (d < second) {
          second = d;
        }
      }
      out.label[Cell{x, y}] = (second - best <= eps) ? RasterPartition::kBoundary : owner;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Planar graphs

struct PlanarGraph {
  std::vector<Point> nodes;
  std::vector<std::pair<int, int>> edges;  // i < j, sorted
  std::vector<double> lengths;

  std::size_t edge_count() const { return edges.size(); }
  double total_length() const { return std::accumulate(lengths.begin(), lengths.end(), 0.0); }
  bool has_edge(int a, int b) const {
    const std::pair<int, int> e = std::minmax(a, b);
    return std::binary_search(edges.begin(), edges.end(), e);
  }
  std::set<std::pair<int, int>> edge_set() const { return {edges.begin(), edges.end()}; }
};

/// Builds a PlanarGraph with normalized (i < j), deduplicated, sorted edges.
inline PlanarGraph make_planar_graph(std::span<const Point> nodes, std::vector<std::pair<int, int>> edges) {
  PlanarGraph g;
  g.nodes.assign(nodes.begin(), nodes.end());
  for (auto& e : edges) {
    if (e.first == e.second) throw std::invalid_argument("planar graph: self-loop");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);
  g.lengths.reserve(g.edges.size());
  for (auto [a, b] : g.edges)
    g.lengths.push_back(distance(g.nodes[static_cast<std::size_t>(a)], g.nodes[static_cast<std::size_t>(b)]));
  return g;
}

// ---------------------------------------------------------------------------
// Delaunay triangulation

namespace detail {

// Incremental triangulation over lexicographically sorted points: every new
// point lies outside the current hull, so insertion only attaches it to the
// visible hull edges; Lawson flips then restore the empty-circle property.
class DelaunayBuilder {
 public:
  explicit DelaunayBuilder(std::vector<Point> pts) : p_(std::move(pts)) {}

  std::vector<std::pair<int, int>> run() {
    const int n = static_cast<int>(p_.size());
    int k = 2;
    while (k < n && orient2d(p_[0], p_[1], p_[static_cast<std::size_t>(k)]) == 0) ++k;
    if (k == n) {
      std::vector<std::pair<int, int>> path;
      for (int i = 0; i + 1 < n; ++i) path.emplace_back(i, i + 1);
      return path;
    }
    // Fan from point k over the collinear chain 0..k-1.
    for (int i = 0; i + 1 < k; ++i) add_ccw(i, i + 1, k);
    rebuild_hull();
    for (int i = 1; i + 1 < k; ++i) legalize_edge(i, k);
    drain();
    for (int i = k + 1; i < n; ++i) insert_outside(i);

    std::set<std::pair<int, int>> edges;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      for (int e = 0; e < 3; ++e) {
        const int a = t.v[e], b = t.v[(e + 1) % 3];
        edges.insert(std::minmax(a, b));
      }
    }
    return {edges.begin(), edges.end()};
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    bool alive = true;
  };

  std::vector<Point> p_;
  std::vector<Tri> tris_;
  std::map<std::pair<int, int>, int> edge_to_tri_;  // directed edge -> triangle holding it ccw
  std::vector<int> hull_;                            // ccw hull vertex cycle
  std::vector<std::pair<int, int>> stack_;

  const Point& pt(int i) const { return p_[static_cast<std::size_t>(i)]; }

  void add_ccw(int a, int b, int c) {
    if (orient2d(pt(a), pt(b), pt(c)) < 0) std::swap(a, b);
    const int id = static_cast<int>(tris_.size());
    tris_.push_back({{a, b, c}, true});
    edge_to_tri_[{a, b}] = id;
    edge_to_tri_[{b, c}] = id;
    edge_to_tri_[{c, a}] = id;
  }

  void kill(int id) {
    Tri& t = tris_[static_cast<std::size_t>(id)];
    t.alive = false;
    for (int e = 0; e < 3; ++e) {
      auto it = edge_to_tri_.find({t.v[e], t.v[(e + 1) % 3]});
      if (it != edge_to_tri_.end() && it->second == id) edge_to_tri_.erase(it);
    }
  }

  int tri_on(int a, int b) const {
    auto it = edge_to_tri_.find({a, b});
    return it == edge_to_tri_.end() ? -1 : it->second;
  }

  int opposite(int tri, int a, int b) const {
    for (int v : tris_[static_cast<std::size_t>(tri)].v)
      if (v != a && v != b) return v;
    return -1;
  }

  // Hull edges are directed edges with no twin.
  void rebuild_hull() {
    std::map<int, int> next;
    for (const auto& [e, id] : edge_to_tri_) {
      if (!edge_to_tri_.count({e.second, e.first})) next[e.first] = e.second;
    }
    hull_.clear();
    const int start = next.begin()->first;
    int v = start;
    do {
      hull_.push_back(v);
      v = next.at(v);
    } while (v != start);
  }

  void insert_outside(int q) {
    const int h = static_cast<int>(hull_.size());
    std::vector<char> visible(static_cast<std::size_t>(h), 0);
    for (int i = 0; i < h; ++i) {
      const int a = hull_[static_cast<std::size_t>(i)], b = hull_[static_cast<std::size_t>((i + 1) % h)];
      visible[static_cast<std::size_t>(i)] = orient2d(pt(a), pt(b), pt(q)) < 0;
    }
    for (int i = 0; i < h; ++i) {
      if (!visible[static_cast<std::size_t>(i)]) continue;
      const int a = hull_[static_cast<std::size_t>(i)], b = hull_[static_cast<std::size_t>((i + 1) % h)];
      add_ccw(b, a, q);
      stack_.emplace_back(a, b);
    }
    rebuild_hull();
    drain();
  }

  void legalize_edge(int a, int b) { stack_.emplace_back(a, b); }

  // Cocircular tie: keep the diagonal incident to the lexicographically
  // smallest of the four points (indices are in lexicographic order).
  static bool prefer_flip(int a, int b, int c, int d) {
    return std::min(c, d) < std::min(a, b);
  }

  void drain() {
    while (!stack_.empty()) {
      auto [a, b] = stack_.back();
      stack_.pop_back();
      const int t1 = tri_on(a, b);
      const int t2 = tri_on(b, a);
      if (t1 < 0 || t2 < 0) continue;
      const int c = opposite(t1, a, b);
      const int d = opposite(t2, b, a);
      // t1 = (a, b, c) ccw; d is across edge ab.
      const int s = incircle(pt(a), pt(b), pt(c), pt(d));
      if (s < 0 || (s == 0 && !prefer_flip(a, b, c, d))) continue;
      kill(t1);
      kill(t2);
      add_ccw(c, a, d);
      add_ccw(c, d, b);
      stack_.emplace_back(a, d);
      stack_.emplace_back(d, b);
      stack_.emplace_back(b, c);
      stack_.emplace_back(c, a);
    }
  }
};

}  // namespace detail

/// Delaunay triangulation with exact predicates. Two sites give one edge;
/// collinear sets give the path in lexicographic order.
inline PlanarGraph delaunay(std::span<const Point> sites) {
  if (sites.size() < 2) throw std::invalid_argument("delaunay: fewer than 2 sites");
  validate_sites(sites);
  std::vector<int> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return lex_less(sites[static_cast<std::size_t>(a)], sites[static_cast<std::size_t>(b)]);
  });
  std::vector<Point> sorted;
  sorted.reserve(sites.size());
  for (int i : order) sorted.push_back(sites[static_cast<std::size_t>(i)]);
  auto local = detail::DelaunayBuilder(std::move(sorted)).run();
  for (auto& [a, b] : local) {
    a = order[static_cast<std::size_t>(a)];
    b = order[static_cast<std::size_t>(b)];
  }
  return make_planar_graph(sites, std::move(local));
}

// ---------------------------------------------------------------------------
// Euclidean minimum spanning tree

/// Kruskal over the complete graph; ties resolved by (length, i, j).
inline PlanarGraph euclidean_mst(std::span<const Point> sites) {
  if (sites.empty()) throw std::invalid_argument("euclidean_mst: empty site set");
  const int n = static_cast<int>(sites.size());
  std::vector<std::tuple<double, int, int>> all;
  all.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      all.emplace_back(distance(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]), i, j);
  std::sort(all.begin(), all.end());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  std::vector<std::pair<int, int>> edges;
  for (const auto& [len, i, j] : all) {
    const int a = find(i), b = find(j);
    if (a == b) continue;
    parent[static_cast<std::size_t>(a)] = b;
    edges.emplace_back(i, j);
    if (static_cast<int>(edges.size()) == n - 1) break;
  }
  return make_planar_graph(sites, std::move(edges));
}

// ---------------------------------------------------------------------------
// Beta skeletons

/// True when `r` lies strictly inside the lune of (p, q) for the given beta.
inline bool in_open_lune(Point p, Point q, Point r, double beta) {
  const double d = distance(p, q);
  const double radius = beta * d / 2.0;
  const Point c1{(1.0 - beta / 2.0) * p.x + (beta / 2.0) * q.x, (1.0 - beta / 2.0) * p.y + (beta / 2.0) * q.y};
  const Point c2{(beta / 2.0) * p.x + (1.0 - beta / 2.0) * q.x, (beta / 2.0) * p.y + (1.0 - beta / 2.0) * q.y};
  return distance(r, c1) < radius && distance(r, c2) < radius;
}

/// Lune-based beta skeleton (beta = 1: Gabriel graph, beta = 2: relative
/// neighbourhood graph). Direct O(n^3) test.
inline PlanarGraph beta_skeleton(std::span<const Point> sites, double beta) {
  if (!(beta >= 1.0)) throw std::invalid_argument("beta_skeleton: beta must be >= 1");
  if (sites.size() < 2) throw std::invalid_argument("beta_skeleton: fewer than 2 sites");
  const std::size_t n = sites.size();
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool empty = true;
      for (std::size_t k = 0; k < n && empty; ++k) {
        if (k == i || k == j) continue;
        if (in_open_lune(sites[i], sites[j], sites[k], beta)) empty = false;
      }
      if (empty) edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return make_planar_graph(sites, std::move(edges));
}

// ---------------------------------------------------------------------------
// Mazes and grid shortest paths

struct MazeGrid {
  Grid<std::uint8_t> passable;
  Cell start;
  Cell goal;

  bool open(Cell c) const { return passable.contains(c) && passable[c] != 0; }
};

struct GridPath {
  std::vector<Cell> cells;
  double cost = 0.0;  // in cell units; multiply by cell_size for millimetres
};

/// Uniform-cost search over 8-neighbours (diagonal cost sqrt 2). Returns
/// nullopt when the goal is unreachable. Equal-cost predecessors are resolved
/// by the lowest compass index.
inline std::optional<GridPath> grid_shortest_path(const MazeGrid& maze) {
  if (!maze.open(maze.start) || !maze.open(maze.goal))
    throw std::invalid_argument("grid_shortest_path: start and goal must be passable");
  const auto& P = maze.passable;
  const double inf = std::numeric_limits<double>::infinity();
  Grid<double> dist(P.width(), P.height(), inf);
  Grid<std::int32_t> pred(P.width(), P.height(), -1);
  using Item = std::tuple<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[maze.start] = 0.0;
  pq.emplace(0.0, P.index(maze.start));
  while (!pq.empty()) {
    auto [d, i] = pq.top();
    pq.pop();
    const Cell c = P.cell_at(i);
    if (d > dist[c]) continue;
    if (c == maze.goal) break;
    for (int dir = 0; dir < 8; ++dir) {
      const Cell n{c.x + kCompass[dir].x, c.y + kCompass[dir].y};
      if (!maze.open(n)) continue;
      const double nd = d + step_length(dir);
      if (nd < dist[n]) {
        dist[n] = nd;
        pq.emplace(nd, P.index(n));
      }
    }
  }
  if (!(dist[maze.goal] < inf)) return std::nullopt;
  // Walk back choosing the lowest-compass predecessor that is tight.
  GridPath path;
  path.cost = dist[maze.goal];
  Cell c = maze.goal;
  path.cells.push_back(c);
  while (c != maze.start) {
    Cell next = c;
    for (int dir = 0; dir < 8; ++dir) {
      const Cell n{c.x + kCompass[dir].x, c.y + kCompass[dir].y};
      if (!maze.open(n) || !(dist[n] < inf)) continue;
      if (std::abs(dist[n] + step_length(dir) - dist[c]) <= 1e-9) {
        next = n;
        break;
      }
    }
    if (next == c) throw std::logic_error("grid_shortest_path: broken predecessor chain");
    c = next;
    path.cells.push_back(c);
  }
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

/// Cost of an explicit 8-connected cell path, in cell units.
inline double path_cost(std::span<const Cell> cells) {
  double cost = 0.0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const int dir = direction_between(cells[i - 1], cells[i]);
    if (dir < 0) throw std::invalid_argument("path_cost: cells are not 8-neighbours");
    cost += step_length(dir);
  }
  return cost;
}

/// Perfect maze by randomized depth-first carving on a (2*rooms+1)^2 raster:
/// rooms at odd coordinates, passages between them, pillars at even ones.
inline MazeGrid generate_perfect_maze(int rooms_x, int rooms_y, std::uint64_t seed) {
  if (rooms_x < 1 || rooms_y < 1) throw std::invalid_argument("maze: need at least one room");
  const int w = 2 * rooms_x + 1, h = 2 * rooms_y + 1;
  MazeGrid m{Grid<std::uint8_t>(w, h, 0), {1, 1}, {2 * (rooms_x / 2) + 1, 2 * (rooms_y / 2) + 1}};
  SeqRng rng(seed, 0x6d617a65);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(rooms_x) * static_cast<std::size_t>(rooms_y), 0);
  auto room_index = [&](int rx, int ry) { return static_cast<std::size_t>(ry) * static_cast<std::size_t>(rooms_x) + static_cast<std::size_t>(rx); };
  std::vector<std::pair<int, int>> stack{{0, 0}};
  seen[0] = 1;
  m.passable[Cell{1, 1}] = 1;
  static constexpr std::array<std::pair<int, int>, 4> steps{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
  while (!stack.empty()) {
    auto [rx, ry] = stack.back();
    std::array<int, 4> options{};
    int count = 0;
    for (int k = 0; k < 4; ++k) {
      const int nx = rx + steps[static_cast<std::size_t>(k)].first, ny = ry + steps[static_cast<std::size_t>(k)].second;
      if (nx >= 0 && ny >= 0 && nx < rooms_x && ny < rooms_y && !seen[room_index(nx, ny)]) options[static_cast<std::size_t>(count++)] = k;
    }
    if (count == 0) {
      stack.pop_back();
      continue;
    }
    const int k = options[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(count)))];
    const int nx = rx + steps[static_cast<std::size_t>(k)].first, ny = ry + steps[static_cast<std::size_t>(k)].second;
    seen[room_index(nx, ny)] = 1;
    m.passable[Cell{2 * rx + 1 + steps[static_cast<std::size_t>(k)].first, 2 * ry + 1 + steps[static_cast<std::size_t>(k)].second}] = 1;
    m.passable[Cell{2 * nx + 1, 2 * ny + 1}] = 1;
    stack.emplace_back(nx, ny);
  }
  return m;
}

}  // namespace physarum
