#pragma once

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace physarum {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
  friend constexpr bool operator!=(Point a, Point b) { return !(a == b); }
};

/// Lexicographic order: x first, then y.
constexpr bool lex_less(Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace detail {

using BigInt = boost::multiprecision::cpp_int;

// Splits a finite double into mantissa * 2^exp with an integral mantissa.
inline void split_double(double v, std::int64_t& mantissa, int& exponent) {
  if (v == 0.0) {
    mantissa = 0;
    exponent = INT_MAX;
    return;
  }
  int e = 0;
  const double m = std::frexp(v, &e);
  mantissa = static_cast<std::int64_t>(std::ldexp(m, 53));
  exponent = e - 53;
}

// Converts coordinates to integers sharing one power-of-two scale. Positive
// scaling preserves the sign of any homogeneous polynomial.
template <std::size_t N>
std::array<BigInt, N> to_common_integers(const std::array<double, N>& values) {
  std::array<std::int64_t, N> mant{};
  std::array<int, N> expo{};
  int min_exp = INT_MAX;
  for (std::size_t i = 0; i < N; ++i) {
    split_double(values[i], mant[i], expo[i]);
    if (mant[i] != 0) min_exp = std::min(min_exp, expo[i]);
  }
  std::array<BigInt, N> out;
  for (std::size_t i = 0; i < N; ++i) {
    if (mant[i] == 0) {
      out[i] = 0;
    } else {
      out[i] = BigInt(mant[i]);
      out[i] <<= static_cast<unsigned>(expo[i] - min_exp);
    }
  }
  return out;
}

template <typename T>
int sign_of(const T& v) {
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

inline int orient2d_exact(Point a, Point b, Point c) {
  const auto v = to_common_integers<6>({a.x, a.y, b.x, b.y, c.x, c.y});
  const BigInt det = (v[2] - v[0]) * (v[5] - v[1]) - (v[3] - v[1]) * (v[4] - v[0]);
  return sign_of(det);
}

inline int incircle_exact(Point a, Point b, Point c, Point d) {
  const auto v = to_common_integers<8>({a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y});
  const BigInt adx = v[0] - v[6], ady = v[1] - v[7];
  const BigInt bdx = v[2] - v[6], bdy = v[3] - v[7];
  const BigInt cdx = v[4] - v[6], cdy = v[5] - v[7];
  const BigInt alift = adx * adx + ady * ady;
  const BigInt blift = bdx * bdx + bdy * bdy;
  const BigInt clift = cdx * cdx + cdy * cdy;
  const BigInt det = alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
                     clift * (adx * bdy - ady * bdx);
  return sign_of(det);
}

}  // namespace detail

/// Sign of the orientation of (a, b, c): +1 counter-clockwise, -1 clockwise,
/// 0 collinear. Exact: a floating-point filter falls back to big integers.
inline int orient2d(Point a, Point b, Point c) {
  const double l = (b.x - a.x) * (c.y - a.y);
  const double r = (b.y - a.y) * (c.x - a.x);
  const double det = l - r;
  const double bound = 3.3306690738754716e-16 * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::orient2d_exact(a, b, c);
}

/// +1 if d lies strictly inside the circle through counter-clockwise a, b, c;
/// -1 outside; 0 cocircular. Exact.
inline int incircle(Point a, Point b, Point c, Point d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = 1.1102230246251577e-15 * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::incircle_exact(a, b, c, d);
}

}  // namespace physarum
