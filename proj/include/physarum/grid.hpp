#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace physarum {

/// Integer cell coordinate on the substrate raster.
struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(Cell a, Cell b) { return a.x == b.x && a.y == b.y; }
  friend constexpr bool operator!=(Cell a, Cell b) { return !(a == b); }
  friend constexpr bool operator<(Cell a, Cell b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }
};

// Compass order N, NE, E, SE, S, SW, W, NW. Tie-breaking everywhere uses
// the lowest index. Screen coordinates: y grows southwards.
inline constexpr std::array<Cell, 8> kCompass = {{
    {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

inline constexpr std::array<const char*, 8> kCompassNames = {
    "N", "NE", "E", "SE", "S", "SW", "W", "NW"};

inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Length of one step in the given compass direction, in cells.
constexpr double step_length(int dir) { return (dir & 1) ? kSqrt2 : 1.0; }

/// Cosine of the angle between two compass directions.
inline double direction_alignment(int a, int b) {
  static const std::array<double, 5> cosines = {1.0, 0.70710678118654752440, 0.0,
                                                -0.70710678118654752440, -1.0};
  int d = std::abs(a - b) % 8;
  if (d > 4) d = 8 - d;
  return cosines[static_cast<std::size_t>(d)];
}

/// Angle between two compass directions, in multiples of 45 degrees (0..4).
inline int direction_separation(int a, int b) {
  int d = std::abs(a - b) % 8;
  return d > 4 ? 8 - d : d;
}

/// Compass index of the unit step from `from` to an 8-neighbour `to`, or -1.
inline int direction_between(Cell from, Cell to) {
  for (int d = 0; d < 8; ++d) {
    if (from.x + kCompass[d].x == to.x && from.y + kCompass[d].y == to.y) return d;
  }
  return -1;
}

inline constexpr std::size_t kDefaultMaxCells = std::size_t{4096} * 4096;

/// Grid-size cap; PHYSARUM_MAX_CELLS overrides the default.
inline std::size_t max_grid_cells() {
  if (const char* env = std::getenv("PHYSARUM_MAX_CELLS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMaxCells;
}

struct GridSpec {
  int width = 64;
  int height = 64;
  double cell_size = 1.0;  // millimetres per cell

  std::size_t cell_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell_at(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width)),
            static_cast<int>(i / static_cast<std::size_t>(width))};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws std::invalid_argument when the grid violates its invariants.
inline void validate_grid(const GridSpec& g) {
  if (g.width < 8 || g.height < 8) throw std::invalid_argument("grid: width and height must be >= 8");
  if (!(g.cell_size > 0.0) || !std::isfinite(g.cell_size))
    throw std::invalid_argument("grid: cell_size must be > 0");
  if (g.cell_count() > max_grid_cells())
    throw std::invalid_argument("grid: " + std::to_string(g.cell_count()) +
                                " cells exceeds the configured maximum of " +
                                std::to_string(max_grid_cells()));
}

/// Dense row-major raster of T over a GridSpec.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}
  explicit Grid(const GridSpec& spec, T fill = T{}) : Grid(spec.width, spec.height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool same_shape(const Grid& o) const { return width_ == o.width_ && height_ == o.height_; }
  template <typename U>
  bool same_shape(const Grid<U>& o) const { return width_ == o.width() && height_ == o.height(); }

  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell_at(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width_)),
            static_cast<int>(i / static_cast<std::size_t>(width_))};
  }

  decltype(auto) operator[](Cell c) { return data_[index(c)]; }
  decltype(auto) operator[](Cell c) const { return data_[index(c)]; }
  decltype(auto) at(std::size_t i) { return data_[i]; }
  decltype(auto) at(std::size_t i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

}  // namespace physarum
