#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "relaytree/bounds.hpp"

namespace relaytree {

inline constexpr int kMinSensorsLevelCap = 10000;

struct MinSensors {
  TreeSize size = TreeSize::from_height(0);
  double log2_PN = 0.0;  // log2 of alpha_h + beta_h at the chosen height
};

/// Smallest N = 2^h whose root error P_N = alpha_h + beta_h is <= epsilon.
inline MinSensors min_sensors_exact(const ErrorPair& pair0, double epsilon,
                                    int cap = kMinSensorsLevelCap) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    fail(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  }
  if (!in_triangle(side_of(pair0))) {
    fail(ErrorCode::NotInTriangle, "sensor count requires alpha0 + beta0 < 1");
  }
  const double target = std::log2(epsilon);
  ErrorPair pair = pair0;
  for (int h = 0; h <= cap; ++h) {
    const double log2_L = total_error_log2(pair);
    // Closed comparison with the region tolerance, so decimal inputs such as
    // 0.1 + 0.2 against 0.3 land on the intended side.
    if (log2_L <= target + kRegionTolerance) return {TreeSize::from_height(h), log2_L};
    pair = fuse(pair);
  }
  fail(ErrorCode::NoConvergence,
       "P_N above epsilon after " + std::to_string(cap) + " levels");
}

struct GrowthRow {
  double epsilon = 0.0;
  MinSensors min;
  double ratio = 0.0;  // N_min / (log2 epsilon)^2
};

struct GrowthResult {
  std::vector<GrowthRow> rows;
  double ratio_lo = 0.0;
  double ratio_hi = 0.0;
};

inline GrowthResult min_sensors_growth(const ErrorPair& pair0,
                                       const std::vector<double>& epsilons) {
  if (epsilons.empty()) fail(ErrorCode::InvalidArgument, "no epsilons given");
  for (std::size_t i = 1; i < epsilons.size(); ++i) {
    if (!(epsilons[i] < epsilons[i - 1])) {
      fail(ErrorCode::InvalidArgument, "epsilons must be strictly decreasing");
    }
  }
  GrowthResult out;
  for (double eps : epsilons) {
    GrowthRow row;
    row.epsilon = eps;
    row.min = min_sensors_exact(pair0, eps);
    const double le = std::log2(eps);
    row.ratio = row.min.size.leaves() / (le * le);
    out.rows.push_back(row);
  }
  const auto [lo, hi] = std::minmax_element(
      out.rows.begin(), out.rows.end(),
      [](const GrowthRow& a, const GrowthRow& b) { return a.ratio < b.ratio; });
  out.ratio_lo = lo->ratio;
  out.ratio_hi = hi->ratio;
  return out;
}

/// (log2 P_N^-1) / (sqrt(N) log2 L_0^-1) from the exact recursion.
inline double asymptotic_ratio(const ErrorPair& pair0, TreeSize size) {
  if (!in_r(pair0)) fail(ErrorCode::InvalidArgument, "pair0 must lie in R");
  if (!size.even()) fail(ErrorCode::InvalidArgument, "height must be even");
  const double l0 = -total_error_log2(pair0);
  if (!std::isfinite(l0)) fail(ErrorCode::InvalidArgument, "L0 must be positive");
  const double lN = -total_error_log2(iterate(pair0, size.height()));
  return lN / (std::ldexp(1.0, size.height() / 2) * l0);
}

/// Lower end of the ratio range implied by the Theorem 1 lower bound.
inline double asymptotic_ratio_floor(double log2_L0_inv, TreeSize size) {
  const double root = std::ldexp(1.0, size.height() / 2);
  return 1.0 - (size.height() / 2.0) / (log2_L0_inv * root);
}

/// How the per-sensor margin eta_N = 1 - L_0^(N) shrinks with N.
enum class CrummySchedule {
  InvSqrt,     // c / sqrt(N)
  InvQuarter,  // c * N^(-1/4)
  InvLinear,   // c / N
  Constant,    // c
};

inline const char* to_string(CrummySchedule s) {
  switch (s) {
    case CrummySchedule::InvSqrt: return "inv-sqrt";
    case CrummySchedule::InvQuarter: return "inv-quarter";
    case CrummySchedule::InvLinear: return "inv-linear";
    case CrummySchedule::Constant: return "constant";
  }
  return "?";
}

inline double crummy_eta(CrummySchedule schedule, double c, TreeSize size) {
  const int h = size.height();
  switch (schedule) {
    case CrummySchedule::InvSqrt: return c * std::exp2(-h / 2.0);
    case CrummySchedule::InvQuarter: return c * std::exp2(-h / 4.0);
    case CrummySchedule::InvLinear: return c * std::exp2(-h);
    case CrummySchedule::Constant: return c;
  }
  return c;
}

struct CrummyRow {
  TreeSize size = TreeSize::from_height(0);
  double eta = 0.0;
  double log2_PN = 0.0;
};

struct CrummyScanResult {
  std::vector<CrummyRow> rows;
};

/// Initial pair with L_0 = 1 - eta split as (split L_0, (1 - split) L_0).
inline ErrorPair crummy_initial_pair(double eta, double split) {
  const double log2_L0 = std::log1p(-eta) / std::numbers::ln2;
  return {ExtendedProb::from_log2(std::log2(split) + log2_L0),
          ExtendedProb::from_log2(std::log2(1.0 - split) + log2_L0)};
}

inline CrummyScanResult crummy_scan(double c, const std::vector<int>& heights,
                                    double split,
                                    CrummySchedule schedule = CrummySchedule::InvSqrt) {
  if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "c must be positive");
  if (!(split > 0.0 && split < 1.0)) {
    fail(ErrorCode::InvalidArgument, "split must lie in (0, 1)");
  }
  if (heights.empty()) fail(ErrorCode::InvalidArgument, "no heights given");
  for (int h : heights) {
    if (h < 0 || h % 2 != 0) fail(ErrorCode::InvalidArgument, "heights must be even and >= 0");
  }
  const int smallest = *std::min_element(heights.begin(), heights.end());
  if (crummy_eta(schedule, c, TreeSize::from_height(smallest)) >= 1.0) {
    fail(ErrorCode::InvalidArgument, "eta >= 1 at the smallest N");
  }
  CrummyScanResult out;
  for (int h : heights) {
    const TreeSize size = TreeSize::from_height(h);
    const double eta = crummy_eta(schedule, c, size);
    const ErrorPair root = iterate(crummy_initial_pair(eta, split), h);
    out.rows.push_back({size, eta, total_error_log2(root)});
  }
  return out;
}

}  // namespace relaytree
