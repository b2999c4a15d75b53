#pragma once

// Closed-form bounds on log2 P_N^-1 for a balanced binary relay tree with
// N = 2^h leaves, where P_N = alpha_h + beta_h is twice the total error
// probability at the root.
//
// Every bound has the shape X (l - log2 X / X) <= log2 P_N^-1 <= X l with
// l = log2 L_0^-1 and X a power of two fixed by the case, so each formula is
// carried as the exponent log2 X.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "relaytree/trajectory.hpp"

namespace relaytree {

/// Height of a balanced binary tree; leaf count N = 2^height.
class TreeSize {
 public:
  static TreeSize from_height(int height) {
    if (height < 0) fail(ErrorCode::InvalidArgument, "height must be >= 0");
    return TreeSize(height);
  }

  static TreeSize from_leaves(std::uint64_t leaves) {
    if (!std::has_single_bit(leaves)) {
      fail(ErrorCode::InvalidArgument,
           "leaf count " + std::to_string(leaves) + " is not a power of two");
    }
    return TreeSize(std::countr_zero(leaves));
  }

  int height() const { return height_; }
  double leaves() const { return std::ldexp(1.0, height_); }
  bool even() const { return height_ % 2 == 0; }

  friend bool operator==(TreeSize, TreeSize) = default;

 private:
  explicit TreeSize(int height) : height_(height) {}
  int height_;
};

enum class Theorem {
  Corollary1,
  Theorem1,
  Theorem2,
  Theorem3EvenVisit,
  Theorem3OddVisit,
  Theorem4OddGap,
  Theorem4EvenGap,
};

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::Corollary1: return "Corollary1";
    case Theorem::Theorem1: return "Theorem1";
    case Theorem::Theorem2: return "Theorem2";
    case Theorem::Theorem3EvenVisit: return "Theorem3EvenVisit";
    case Theorem::Theorem3OddVisit: return "Theorem3OddVisit";
    case Theorem::Theorem4OddGap: return "Theorem4OddGap";
    case Theorem::Theorem4EvenGap: return "Theorem4EvenGap";
  }
  return "?";
}

enum class VisitParity { Even, Odd };

struct BoundInputs {
  double log2_L0 = 0.0;
  TreeSize size = TreeSize::from_height(0);
  std::optional<int> band;
};

struct BoundResult {
  double lower = 0.0;          // formula value, may be negative
  double lower_clamped = 0.0;  // max(lower, 0)
  double upper = 0.0;
  Theorem theorem = Theorem::Corollary1;
  BoundInputs inputs;
};

namespace detail {

inline void check_exponent(double log2_L0_inv) {
  if (!(log2_L0_inv > 0.0)) {
    fail(ErrorCode::InvalidArgument, "log2 L0^-1 must be positive");
  }
}

// X l - log2 X, written so that l = +inf stays +inf.
inline double scaled_lower(double log2_scale, double l) {
  return l * std::exp2(log2_scale) - log2_scale;
}

inline double scaled_upper(double log2_scale, double l) {
  return l * std::exp2(log2_scale);
}

inline BoundResult make_bound(Theorem theorem, double log2_L0_inv,
                              TreeSize size, double lower, double upper,
                              std::optional<int> band = std::nullopt) {
  BoundResult r;
  r.lower = lower;
  r.lower_clamped = std::max(lower, 0.0);
  r.upper = upper;
  r.theorem = theorem;
  r.inputs = {-log2_L0_inv, size, band};
  return r;
}

inline BoundResult symmetric_bound(Theorem theorem, double l, TreeSize size,
                                   double log2_lower_scale,
                                   double log2_upper_scale,
                                   std::optional<int> band = std::nullopt) {
  return make_bound(theorem, l, size, scaled_lower(log2_lower_scale, l),
                    scaled_upper(log2_upper_scale, l), band);
}

}  // namespace detail

/// Trajectory still marching through B_m, m >= 2, with h < m.
inline BoundResult bound_corollary1(double log2_L0_inv, TreeSize size) {
  detail::check_exponent(log2_L0_inv);
  const double h = size.height();
  return detail::symmetric_bound(Theorem::Corollary1, log2_L0_inv, size, h, h);
}

/// Start in R, even height.
inline BoundResult bound_theorem1(double log2_L0_inv, TreeSize size) {
  detail::check_exponent(log2_L0_inv);
  if (!size.even()) fail(ErrorCode::InvalidArgument, "Theorem 1 needs even height");
  const double s = size.height() / 2;
  return detail::symmetric_bound(Theorem::Theorem1, log2_L0_inv, size, s, s);
}

/// Start in R, odd height.
inline BoundResult bound_theorem2(double log2_L0_inv, TreeSize size) {
  detail::check_exponent(log2_L0_inv);
  if (size.even()) fail(ErrorCode::InvalidArgument, "Theorem 2 needs odd height");
  const int h = size.height();
  return detail::symmetric_bound(Theorem::Theorem2, log2_L0_inv, size,
                                 (h - 1) / 2, (h + 1) / 2);
}

/// Start in R, odd height, with a visit to B_2 n R_U at a level of the given
/// parity.
inline BoundResult bound_theorem3(double log2_L0_inv, TreeSize size,
                                  VisitParity parity) {
  detail::check_exponent(log2_L0_inv);
  if (size.even()) fail(ErrorCode::InvalidArgument, "Theorem 3 needs odd height");
  const int h = size.height();
  if (parity == VisitParity::Even) {
    return detail::symmetric_bound(Theorem::Theorem3EvenVisit, log2_L0_inv,
                                   size, (h + 1) / 2, (h + 1) / 2);
  }
  const double s = (h - 1) / 2;
  return detail::make_bound(Theorem::Theorem3OddVisit, log2_L0_inv, size,
                            detail::scaled_lower(s, log2_L0_inv),
                            detail::scaled_upper(s, log2_L0_inv) + 1.0);
}

/// Start in B_m, m >= 2, general height.
inline BoundResult bound_theorem4(double log2_L0_inv, TreeSize size, int m) {
  detail::check_exponent(log2_L0_inv);
  if (m < 2) fail(ErrorCode::InvalidArgument, "Theorem 4 needs band m >= 2");
  const int h = size.height();
  if (h <= m - 1) {
    BoundResult r = bound_corollary1(log2_L0_inv, size);
    r.inputs.band = m;
    return r;
  }
  if ((h - m) % 2 != 0) {
    const double s = (m - 1 + h) / 2;
    return detail::symmetric_bound(Theorem::Theorem4OddGap, log2_L0_inv, size,
                                   s, s, m);
  }
  return detail::symmetric_bound(Theorem::Theorem4EvenGap, log2_L0_inv, size,
                                 (m - 2 + h) / 2, (m + h) / 2, m);
}

struct SequenceBound {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds on log2 alpha_k^-1 for a start in S and even k.
inline SequenceBound bound_corollary2_alpha(double log2_alpha0_inv, int k) {
  if (k < 0 || k % 2 != 0) fail(ErrorCode::InvalidArgument, "k must be even and >= 0");
  if (!(log2_alpha0_inv >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "log2 alpha0^-1 must be >= 0");
  }
  const double scale = std::ldexp(1.0, k / 2);
  return {scale * log2_alpha0_inv - k, scale * log2_alpha0_inv};
}

/// Same shape for beta.
inline SequenceBound bound_corollary2_beta(double log2_beta0_inv, int k) {
  return bound_corollary2_alpha(log2_beta0_inv, k);
}

/// First level k < last with the state in B_2 n R_U.
inline std::optional<int> detect_b2ru_visit(const Trajectory& trajectory) {
  if (trajectory.states.empty()) {
    fail(ErrorCode::InvalidArgument, "empty trajectory");
  }
  for (int k = 0; k < trajectory.levels(); ++k) {
    if (in_b2_r(trajectory.states[static_cast<std::size_t>(k)].pair)) return k;
  }
  return std::nullopt;
}

inline BoundResult select_bounds(const ErrorPair& pair0, TreeSize size) {
  const RegionTag tag = classify(pair0);
  if (!in_triangle(tag.side)) {
    fail(ErrorCode::NotInTriangle, "bounds require alpha0 + beta0 < 1");
  }
  if (size.height() < 1) fail(ErrorCode::InvalidArgument, "bounds require N >= 2");
  const double l = -total_error_log2(pair0);
  if (tag.in_R) {
    if (size.even()) return bound_theorem1(l, size);
    const auto visit = detect_b2ru_visit(evolve(pair0, size.height()));
    if (visit) {
      return bound_theorem3(
          l, size, *visit % 2 == 0 ? VisitParity::Even : VisitParity::Odd);
    }
    return bound_theorem2(l, size);
  }
  const int m = *tag.b_index;
  if (m < 2) {
    // B_1 lies inside R, so a B_1 point outside R breaks the geometry.
    fail(ErrorCode::InvalidArgument, "band 1 point classified outside R");
  }
  return bound_theorem4(l, size, m);
}

struct SandwichResult {
  double exact = 0.0;  // log2 P_N^-1 from the recursion
  BoundResult bound;
  bool ok = false;
};

/// Relative slack for floating comparisons of bound against exact value.
inline constexpr double kSandwichSlack = 1e-12;

inline bool within_sandwich(double exact, const BoundResult& b) {
  const auto slack = [](double v) {
    return std::isfinite(v) ? kSandwichSlack * std::max(1.0, std::fabs(v)) : 0.0;
  };
  return b.lower_clamped <= exact + slack(exact) &&
         exact <= b.upper + slack(b.upper);
}

inline SandwichResult sandwich_check(const ErrorPair& pair0, TreeSize size) {
  SandwichResult out;
  out.bound = select_bounds(pair0, size);
  out.exact = -total_error_log2(iterate(pair0, size.height()));
  out.ok = within_sandwich(out.exact, out.bound);
  return out;
}

}  // namespace relaytree
