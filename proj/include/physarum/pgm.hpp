#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "physarum/grid.hpp"

namespace physarum {

/// 8-bit greyscale raster.
struct GreyImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  friend bool operator==(const GreyImage&, const GreyImage&) = default;
};

/// Binary PGM: header "P5 w h 255" with one space between tokens and a single
/// newline before the pixel bytes.
inline std::string encode_pgm(const GreyImage& img) {
  std::string out = "P5 " + std::to_string(img.width) + " " + std::to_string(img.height) + " 255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

inline void write_pgm(const GreyImage& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  const std::string bytes = encode_pgm(img);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

/// Accepts P5 (binary) and P2 (ASCII) PGM with maxval <= 255, including '#' comments.
inline GreyImage decode_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_token = [&] {
    skip_ws();
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) && bytes[pos] != '#') ++pos;
    if (start == pos) throw std::runtime_error("pgm: truncated header");
    return bytes.substr(start, pos - start);
  };
  auto read_int = [&] {
    const std::string t = read_token();
    std::size_t used = 0;
    const int v = std::stoi(t, &used);
    if (used != t.size()) throw std::runtime_error("pgm: bad integer '" + t + "'");
    return v;
  };

  const std::string magic = read_token();
  if (magic != "P5" && magic != "P2") throw std::runtime_error("pgm: unsupported magic " + magic);
  GreyImage img;
  img.width = read_int();
  img.height = read_int();
  const int maxval = read_int();
  if (img.width <= 0 || img.height <= 0) throw std::runtime_error("pgm: bad dimensions");
  if (maxval <= 0 || maxval > 255) throw std::runtime_error("pgm: only 8-bit images supported");
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(n);
  if (magic == "P5") {
    ++pos;  // single whitespace after maxval
    if (bytes.size() < pos + n) throw std::runtime_error("pgm: truncated pixel data");
    for (std::size_t i = 0; i < n; ++i) img.pixels[i] = static_cast<std::uint8_t>(bytes[pos + i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) img.pixels[i] = static_cast<std::uint8_t>(read_int());
  }
  if (maxval != 255) {
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>((p * 255 + maxval / 2) / maxval);
  }
  return img;
}

inline GreyImage read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_pgm(bytes);
}

}  // namespace physarum
