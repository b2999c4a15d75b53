#pragma once

#include <vector>

#include "relaytree/regions.hpp"

namespace relaytree {

struct TrajectoryState {
  int level = 0;
  ErrorPair pair;
  RegionTag tag;
};

struct Trajectory {
  std::vector<TrajectoryState> states;
  std::vector<double> log2_L;  // log2(alpha_k + beta_k)

  const TrajectoryState& back() const { return states.back(); }
  int levels() const { return static_cast<int>(states.size()) - 1; }
};

inline Trajectory evolve(const ErrorPair& pair0, int levels) {
  if (levels < 0) fail(ErrorCode::InvalidArgument, "levels must be >= 0");
  Trajectory t;
  t.states.reserve(static_cast<std::size_t>(levels) + 1);
  t.log2_L.reserve(static_cast<std::size_t>(levels) + 1);
  ErrorPair pair = pair0;
  for (int k = 0;; ++k) {
    t.states.push_back({k, pair, classify(pair)});
    t.log2_L.push_back(total_error_log2(pair));
    if (k == levels) break;
    pair = fuse(pair);
  }
  return t;
}

/// Pair at `levels` without classifying intermediate states.
inline ErrorPair iterate(ErrorPair pair, int levels) {
  for (int k = 0; k < levels; ++k) pair = fuse(pair);
  return pair;
}

}  // namespace relaytree
