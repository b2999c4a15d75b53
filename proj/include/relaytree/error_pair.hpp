#pragma once

#include "relaytree/extended_prob.hpp"

namespace relaytree {

/// Type I (alpha) and Type II (beta) error probabilities shared by every node
/// on one tree level.
struct ErrorPair {
  ExtendedProb alpha;
  ExtendedProb beta;

  static ErrorPair from_values(double alpha, double beta) {
    return {ExtendedProb::from_value(alpha), ExtendedProb::from_value(beta)};
  }

  /// Reflection across beta = alpha.
  ErrorPair swapped() const { return {beta, alpha}; }

  /// Reflection across alpha + beta = 1.
  ErrorPair complemented() const {
    return {alpha.complement(), beta.complement()};
  }

  friend bool operator==(const ErrorPair&, const ErrorPair&) = default;
};

}  // namespace relaytree
