#pragma once

#include <array>
#include <limits>
#include <cmath>
#include <string>

#include "relaytree/error_pair.hpp"

namespace relaytree {

/// One level of likelihood-ratio fusion of two identical children.
///
/// alpha <= beta fuses with OR: (1 - (1 - alpha)^2, beta^2).
/// alpha >  beta fuses with AND: (alpha^2, 1 - (1 - beta)^2).
inline ErrorPair fuse(const ErrorPair& pair) {
  if (pair.alpha <= pair.beta) {
    return {pair.alpha.complement_squared(), pair.beta.squared()};
  }
  return {pair.alpha.squared(), pair.beta.complement_squared()};
}

/// log2(alpha + beta); -inf for (0, 0).
inline double total_error_log2(const ErrorPair& pair) {
  return log2d::sum(pair.alpha.log2_p(), pair.beta.log2_p());
}

enum class Gate { Or, And };

inline const char* to_string(Gate gate) {
  return gate == Gate::Or ? "OR" : "AND";
}

/// Gate applied by the nodes that fuse children carrying `pair`.
inline Gate gate_for(const ErrorPair& pair) {
  return pair.alpha <= pair.beta ? Gate::Or : Gate::And;
}

struct PlainPair {
  double alpha = 0.0;
  double beta = 0.0;
};

struct OracleOutcome {
  PlainPair fused;
  Gate gate = Gate::Or;
};

namespace detail {

inline bool apply_gate(Gate gate, bool lhs, bool rhs) {
  return gate == Gate::Or ? (lhs || rhs) : (lhs && rhs);
}

// Error pair of a parent applying `gate` to two independent children, by
// summing over the four joint child messages under each hypothesis.
inline PlainPair enumerate_gate(Gate gate, double alpha, double beta) {
  // Message 1 has probability alpha under H0 and 1 - beta under H1.
  const std::array<double, 2> h0{1.0 - alpha, alpha};
  const std::array<double, 2> h1{beta, 1.0 - beta};
  PlainPair out;
  for (int u1 = 0; u1 < 2; ++u1) {
    for (int u2 = 0; u2 < 2; ++u2) {
      if (apply_gate(gate, u1 != 0, u2 != 0)) {
        out.alpha += h0[u1] * h0[u2];
      } else {
        out.beta += h1[u1] * h1[u2];
      }
    }
  }
  return out;
}

}  // namespace detail

/// Reference fusion in plain doubles: enumerate the OR and AND rules and keep
/// the one with the smaller total error, ties going to OR.
inline OracleOutcome fuse_oracle(double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "oracle input outside [0, 1]");
  }
  if (alpha + beta >= 1.0) {
    fail(ErrorCode::NotInTriangle,
         "oracle rule selection requires alpha + beta < 1");
  }
  const PlainPair by_or = detail::enumerate_gate(Gate::Or, alpha, beta);
  const PlainPair by_and = detail::enumerate_gate(Gate::And, alpha, beta);
  // Totals agree only up to rounding on the diagonal, so compare with a few
  // ulps of slack.
  const double t_or = by_or.alpha + by_or.beta;
  const double t_and = by_and.alpha + by_and.beta;
  if (t_or <= t_and + 8.0 * std::numeric_limits<double>::epsilon() * t_and) {
    return {by_or, Gate::Or};
  }
  return {by_and, Gate::And};
}

inline ErrorPair fuse_oracle(const ErrorPair& pair) {
  const OracleOutcome out =
      fuse_oracle(pair.alpha.value(), pair.beta.value());
  return ErrorPair::from_values(out.fused.alpha, out.fused.beta);
}

}  // namespace relaytree
