#pragma once

// Probabilities stored as the pair (log2 p, log2(1 - p)).
//
// The relay recursion squares probabilities once per level, so the total
// error decays doubly exponentially and a plain double underflows after about
// twenty levels. Squaring doubles a log, which stays representable for
// thousands of levels. Keeping the complement channel too means quantities of
// the form 1 - (1 - p)^2 never need to be formed by cancellation.

#include <cmath>
#include <compare>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "relaytree/error.hpp"

namespace relaytree {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Symmetric tolerance applied to every region-boundary comparison (2^-44).
inline constexpr double kRegionTolerance = 0x1p-44;

namespace log2d {

/// log2(1 + 2^x) for x <= 0.
inline double one_plus_pow2(double x) {
  if (x == kNegInf) return 0.0;
  return std::log1p(std::exp2(x)) / std::numbers::ln2;
}

/// log2(1 - 2^x) for x <= 0; -inf at x = 0.
inline double one_minus_pow2(double x) {
  if (x == kNegInf) return 0.0;
  if (x >= 0.0) return kNegInf;
  if (x < -1.0) return std::log1p(-std::exp2(x)) / std::numbers::ln2;
  return std::log2(-std::expm1(x * std::numbers::ln2));
}

/// log2(2^x + 2^y).
inline double sum(double x, double y) {
  if (x < y) std::swap(x, y);
  if (x == kNegInf) return kNegInf;
  return x + one_plus_pow2(y - x);
}

/// Difference x - y that treats (-inf) - (-inf) as 0.
inline double gap(double x, double y) {
  if (x == y) return 0.0;
  return x - y;
}

}  // namespace log2d

class ExtendedProb {
 public:
  /// Zero probability.
  constexpr ExtendedProb() = default;

  static ExtendedProb from_value(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      fail(ErrorCode::InvalidArgument,
           "probability " + show(p) + " outside [0, 1]");
    }
    // 1 - p is exact for p in [0.5, 1], so take the log of whichever side
    // is known exactly and derive the other.
    if (p <= 0.5) return from_log2(std::log2(p));
    return from_log2_complement(std::log2(1.0 - p));
  }

  static ExtendedProb from_log2(double log2_p) {
    check_log(log2_p);
    return ExtendedProb(log2_p, log2d::one_minus_pow2(log2_p));
  }

  static ExtendedProb from_log2_complement(double log2_q) {
    check_log(log2_q);
    return ExtendedProb(log2d::one_minus_pow2(log2_q), log2_q);
  }

  /// Builds from two independently computed channels. The smaller channel is
  /// the accurately known one; the larger is recomputed from it so the pair
  /// stays consistent.
  static ExtendedProb from_channels(double log2_p, double log2_q) {
    return log2_p <= log2_q ? from_log2(log2_p) : from_log2_complement(log2_q);
  }

  static ExtendedProb zero() { return ExtendedProb(); }
  static ExtendedProb one() { return ExtendedProb(0.0, kNegInf); }

  double log2_p() const { return log2_p_; }
  double log2_q() const { return log2_q_; }
  double value() const { return std::exp2(log2_p_); }
  double complement_value() const { return std::exp2(log2_q_); }

  /// True when p <= 1/2, i.e. log2_p is the accurately held channel.
  bool is_lower_half() const { return log2_p_ <= log2_q_; }

  ExtendedProb complement() const { return ExtendedProb(log2_q_, log2_p_); }

  /// p^2, with 1 - p^2 = (1 - p)(1 + p).
  ExtendedProb squared() const {
    return from_channels(2.0 * log2_p_,
                         log2_q_ + log2d::one_plus_pow2(log2_p_));
  }

  /// 1 - (1 - p)^2, with p(2 - p) = p(1 + (1 - p)).
  ExtendedProb complement_squared() const {
    return complement().squared().complement();
  }

  friend bool operator==(const ExtendedProb&, const ExtendedProb&) = default;

  /// Total order on the represented probability.
  friend std::partial_ordering operator<=>(const ExtendedProb& a,
                                           const ExtendedProb& b) {
    const bool a_low = a.is_lower_half();
    const bool b_low = b.is_lower_half();
    if (a_low != b_low) {
      return a_low ? std::partial_ordering::less
                   : std::partial_ordering::greater;
    }
    if (a_low) return a.log2_p_ <=> b.log2_p_;
    return b.log2_q_ <=> a.log2_q_;
  }

 private:
  constexpr ExtendedProb(double log2_p, double log2_q)
      : log2_p_(log2_p), log2_q_(log2_q) {}

  static std::string show(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

  static void check_log(double x) {
    if (std::isnan(x) || x > 0.0) {
      fail(ErrorCode::InvalidArgument,
           "log2 probability " + show(x) + " outside [-inf, 0]");
    }
  }

  double log2_p_ = kNegInf;
  double log2_q_ = 0.0;
};

}  // namespace relaytree
