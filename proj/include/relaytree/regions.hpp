#pragma once

// Region geometry of the (alpha, beta) plane.
//
// The upper triangle U = {alpha + beta < 1, beta >= alpha} is split into
// bands B_m: the points whose trajectory first crosses beta = alpha after
// exactly m fusions. With (a, b) the pair reflected into U,
//
//   (a, b) in B_m  <=>  m is the smallest m >= 1 with
//                       (1 - a)^(2^m) + b^(2^m) <= 1.
//
// R holds the points with sqrt(1 - b) + sqrt(a) >= 1 and is invariant under
// fusion; S is the sub-region of B_1 between b = 1 - (1 - a)^2 and
// b = sqrt(a), also invariant. All comparisons run on log2 channels and treat
// points within kRegionTolerance of a boundary as inside the closed region.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "relaytree/dynamics.hpp"

namespace relaytree {

enum class Side {
  UpperTriangle,  // alpha + beta < 1, beta >= alpha
  LowerTriangle,  // alpha + beta < 1, beta < alpha
  DiagonalSum1,   // alpha + beta == 1 within tolerance
  BeyondSum1,     // alpha + beta > 1
};

inline const char* to_string(Side side) {
  switch (side) {
    case Side::UpperTriangle: return "UpperTriangle";
    case Side::LowerTriangle: return "LowerTriangle";
    case Side::DiagonalSum1: return "DiagonalSum1";
    case Side::BeyondSum1: return "BeyondSum1";
  }
  return "?";
}

inline bool in_triangle(Side side) {
  return side == Side::UpperTriangle || side == Side::LowerTriangle;
}

struct RegionTag {
  Side side = Side::UpperTriangle;
  std::optional<int> b_index;
  bool in_R = false;
  bool in_S = false;
  bool above_diagonal = true;  // beta >= alpha

  friend bool operator==(const RegionTag&, const RegionTag&) = default;
};

enum class Region { B1, R, S };

inline constexpr int kBandIndexCap = 1074;
inline constexpr int kEntryLevelCap = 10000;

/// Pair reflected into the upper triangle: a = min, b = max.
struct Reflected {
  ExtendedProb a;
  ExtendedProb b;
};

inline Reflected reflect_upper(const ErrorPair& pair) {
  if (pair.alpha <= pair.beta) return {pair.alpha, pair.beta};
  return {pair.beta, pair.alpha};
}

inline Side side_of(const ErrorPair& pair) {
  // alpha + beta vs 1 is alpha vs 1 - beta, compared channel to channel.
  const double d = log2d::gap(pair.alpha.log2_p(), pair.beta.log2_q());
  if (std::fabs(d) <= kRegionTolerance) return Side::DiagonalSum1;
  if (d > 0.0) return Side::BeyondSum1;
  return pair.alpha <= pair.beta ? Side::UpperTriangle : Side::LowerTriangle;
}

namespace detail {

// log2((1 - a)^(2^m) + b^(2^m)).
inline double band_sum_log2(const Reflected& r, int m) {
  return log2d::sum(std::ldexp(r.a.log2_q(), m), std::ldexp(r.b.log2_p(), m));
}

inline bool within_band(const Reflected& r, int m) {
  return band_sum_log2(r, m) <= kRegionTolerance;
}

inline bool in_r_reflected(const Reflected& r) {
  return log2d::sum(0.5 * r.b.log2_q(), 0.5 * r.a.log2_p()) >=
         -kRegionTolerance;
}

inline bool in_s_reflected(const Reflected& r) {
  const double lb = r.b.log2_p();
  const double upper = 0.5 * r.a.log2_p();
  const double lower = r.a.complement_squared().log2_p();
  return log2d::gap(lb, upper) <= kRegionTolerance &&
         log2d::gap(lb, lower) >= -kRegionTolerance;
}

}  // namespace detail

/// Band index m of a pair strictly inside the triangle.
inline int b_index(const ErrorPair& pair, int cap = kBandIndexCap) {
  if (!in_triangle(side_of(pair))) {
    fail(ErrorCode::NotInTriangle, "band index requires alpha + beta < 1");
  }
  const Reflected r = reflect_upper(pair);
  for (int m = 1; m <= cap; ++m) {
    if (detail::within_band(r, m)) return m;
  }
  fail(ErrorCode::IndexOverflow,
       "band index exceeds cap " + std::to_string(cap));
}

inline bool in_b1(const ErrorPair& pair) {
  return in_triangle(side_of(pair)) &&
         detail::within_band(reflect_upper(pair), 1);
}

inline bool in_r(const ErrorPair& pair) {
  return in_triangle(side_of(pair)) &&
         detail::in_r_reflected(reflect_upper(pair));
}

inline bool in_s(const ErrorPair& pair) {
  return in_triangle(side_of(pair)) &&
         detail::in_s_reflected(reflect_upper(pair));
}

/// B_2 intersected with R (reflected into the upper triangle).
inline bool in_b2_r(const ErrorPair& pair) {
  if (!in_triangle(side_of(pair))) return false;
  const Reflected r = reflect_upper(pair);
  return !detail::within_band(r, 1) && detail::within_band(r, 2) &&
         detail::in_r_reflected(r);
}

inline bool in_region(const ErrorPair& pair, Region region) {
  switch (region) {
    case Region::B1: return in_b1(pair);
    case Region::R: return in_r(pair);
    case Region::S: return in_s(pair);
  }
  return false;
}

inline RegionTag classify(const ErrorPair& pair, int cap = kBandIndexCap) {
  RegionTag tag;
  tag.side = side_of(pair);
  tag.above_diagonal = pair.alpha <= pair.beta;
  if (!in_triangle(tag.side)) return tag;
  const Reflected r = reflect_upper(pair);
  tag.b_index = b_index(pair, cap);
  tag.in_R = detail::in_r_reflected(r);
  tag.in_S = detail::in_s_reflected(r);
  return tag;
}

/// First level at which the trajectory from pair0 lies in `target`.
inline int entry_level(const ErrorPair& pair0, Region target,
                       int cap = kEntryLevelCap) {
  if (!in_triangle(side_of(pair0))) {
    fail(ErrorCode::NotInTriangle, "entry level requires alpha + beta < 1");
  }
  ErrorPair pair = pair0;
  for (int k = 0; k <= cap; ++k) {
    if (in_region(pair, target)) return k;
    pair = fuse(pair);
  }
  fail(ErrorCode::NoEntry,
       "region not reached within " + std::to_string(cap) + " levels");
}

}  // namespace relaytree
