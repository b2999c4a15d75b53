#pragma once

// Builders for each CLI subcommand. Each returns the full OutputRecord so the
// command-line driver only parses flags and renders.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "relaytree/asymptotics.hpp"
#include "relaytree/montecarlo.hpp"
#include "relaytree/output.hpp"

namespace relaytree {

inline constexpr const char* kPnConvention =
    "P_N = alpha_h + beta_h (twice the total error probability)";

namespace detail {

inline Cell i64(std::int64_t v) { return v; }
inline Cell u64(std::uint64_t v) { return v; }
inline Cell num(double v) { return v; }
inline Cell str(std::string v) { return v; }

// Leaf counts stay integers until they outgrow 64 bits.
inline Cell leaves(TreeSize size) {
  if (size.height() < 64) return std::uint64_t{1} << size.height();
  return size.leaves();
}

inline std::vector<Cell> tag_cells(const RegionTag& tag) {
  return {str(to_string(tag.side)), optional_cell(tag.b_index), Cell{tag.in_R},
          Cell{tag.in_S}};
}

/// Grid coordinate i / (resolution + 1); covers [0, 1) without reaching 1.
inline double grid_coordinate(int i, int resolution) {
  return static_cast<double>(i) / (resolution + 1.0);
}

}  // namespace detail

inline OutputRecord cmd_evolve(double alpha0, double beta0, int levels) {
  const Trajectory t = evolve(ErrorPair::from_values(alpha0, beta0), levels);
  OutputRecord rec;
  rec.command = "evolve";
  rec.inputs = {{"alpha0", alpha0}, {"beta0", beta0},
                {"levels", detail::i64(levels)}};
  rec.columns = {"k", "alpha", "beta", "log2_alpha", "log2_beta", "log2_L",
                 "side", "b_index", "in_R", "in_S"};
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    const auto& s = t.states[k];
    std::vector<Cell> row{detail::i64(s.level), s.pair.alpha.value(),
                          s.pair.beta.value(), s.pair.alpha.log2_p(),
                          s.pair.beta.log2_p(), t.log2_L[k]};
    for (auto& c : detail::tag_cells(s.tag)) row.push_back(std::move(c));
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

inline constexpr int kMinResolution = 2;
inline constexpr int kMaxResolution = 4096;

inline void check_resolution(int resolution) {
  if (resolution < kMinResolution || resolution > kMaxResolution) {
    fail(ErrorCode::InvalidArgument, "resolution must lie in [2, 4096]");
  }
}

inline OutputRecord cmd_regions(int resolution) {
  check_resolution(resolution);
  OutputRecord rec;
  rec.command = "regions";
  rec.inputs = {{"resolution", detail::i64(resolution)}};
  rec.columns = {"alpha", "beta", "side", "b_index", "in_R", "in_S"};
  rec.rows.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const double a = detail::grid_coordinate(i, resolution);
      const double b = detail::grid_coordinate(j, resolution);
      std::vector<Cell> row{a, b};
      for (auto& c : detail::tag_cells(classify(ErrorPair::from_values(a, b)))) {
        row.push_back(std::move(c));
      }
      rec.rows.push_back(std::move(row));
    }
  }
  return rec;
}

enum class RatioRegion { Bm, B1, B2RU, U, FB2RU };
enum class RatioKind { Step1Sq, Step2Sq, Step1Lin };

inline const char* to_string(RatioRegion r) {
  switch (r) {
    case RatioRegion::Bm: return "Bm";
    case RatioRegion::B1: return "B1";
    case RatioRegion::B2RU: return "B2RU";
    case RatioRegion::U: return "U";
    case RatioRegion::FB2RU: return "fB2RU";
  }
  return "?";
}

inline const char* to_string(RatioKind k) {
  switch (k) {
    case RatioKind::Step1Sq: return "step1_sq";
    case RatioKind::Step2Sq: return "step2_sq";
    case RatioKind::Step1Lin: return "step1_lin";
  }
  return "?";
}

/// Region/ratio pairs that correspond to a proved ratio bound.
inline bool ratio_combination_valid(RatioRegion region, RatioKind kind) {
  switch (region) {
    case RatioRegion::Bm: return kind == RatioKind::Step1Sq;
    case RatioRegion::B1: return kind == RatioKind::Step2Sq;
    case RatioRegion::B2RU: return kind != RatioKind::Step1Lin;
    case RatioRegion::U: return kind != RatioKind::Step2Sq;
    case RatioRegion::FB2RU: return kind == RatioKind::Step1Lin;
  }
  return false;
}

/// log2 of the selected ratio at `pair`.
inline double log2_ratio(const ErrorPair& pair, RatioKind kind) {
  const double l0 = total_error_log2(pair);
  const ErrorPair next = fuse(pair);
  switch (kind) {
    case RatioKind::Step1Sq: return total_error_log2(next) - 2.0 * l0;
    case RatioKind::Step2Sq: return total_error_log2(fuse(next)) - 2.0 * l0;
    case RatioKind::Step1Lin: return total_error_log2(next) - l0;
  }
  return 0.0;
}

inline OutputRecord cmd_ratios(RatioRegion region, RatioKind kind, int resolution) {
  check_resolution(resolution);
  if (!ratio_combination_valid(region, kind)) {
    fail(ErrorCode::InvalidArgument, std::string("ratio ") + to_string(kind) +
                                         " is not defined for region " +
                                         to_string(region));
  }
  OutputRecord rec;
  rec.command = "ratios";
  rec.inputs = {{"region", detail::str(to_string(region))},
                {"kind", detail::str(to_string(kind))},
                {"resolution", detail::i64(resolution)}};
  rec.columns = {"alpha", "beta", "ratio"};
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const ErrorPair grid = ErrorPair::from_values(
          detail::grid_coordinate(i, resolution),
          detail::grid_coordinate(j, resolution));
      if (side_of(grid) != Side::UpperTriangle) continue;
      if (grid.alpha == ExtendedProb::zero() && grid.beta == ExtendedProb::zero()) continue;
      ErrorPair point = grid;
      bool keep = true;
      switch (region) {
        case RatioRegion::Bm: keep = b_index(grid) >= 2; break;
        case RatioRegion::B1: keep = in_b1(grid); break;
        case RatioRegion::B2RU: keep = in_b2_r(grid); break;
        case RatioRegion::U: break;
        case RatioRegion::FB2RU:
          keep = in_b2_r(grid);
          point = fuse(grid);
          break;
      }
      if (!keep) continue;
      rec.rows.push_back({point.alpha.value(), point.beta.value(),
                          std::exp2(log2_ratio(point, kind))});
    }
  }
  return rec;
}

inline OutputRecord cmd_bounds(double alpha0, double beta0, TreeSize size) {
  const ErrorPair pair0 = ErrorPair::from_values(alpha0, beta0);
  if (size.height() < 1) fail(ErrorCode::InvalidArgument, "leaves must be >= 2");
  const SandwichResult s = sandwich_check(pair0, size);
  OutputRecord rec;
  rec.command = "bounds";
  rec.single_result = true;
  rec.inputs = {{"alpha0", alpha0}, {"beta0", beta0},
                {"leaves", detail::leaves(size)}, {"height", detail::i64(size.height())}};
  rec.columns = {"theorem", "band_index", "log2_L0", "exact_log2_PN_inv",
                 "lower", "lower_clamped", "upper", "ok", "pn_convention"};
  rec.rows.push_back({detail::str(to_string(s.bound.theorem)),
                      optional_cell(s.bound.inputs.band), s.bound.inputs.log2_L0,
                      s.exact, s.bound.lower, s.bound.lower_clamped,
                      s.bound.upper, Cell{s.ok}, detail::str(kPnConvention)});
  return rec;
}

inline OutputRecord cmd_min_sensors(double alpha0, double beta0, double epsilon) {
  const ErrorPair pair0 = ErrorPair::from_values(alpha0, beta0);
  const MinSensors m = min_sensors_exact(pair0, epsilon);
  const double le = std::log2(epsilon);
  OutputRecord rec;
  rec.command = "min-sensors";
  rec.single_result = true;
  rec.inputs = {{"alpha0", alpha0}, {"beta0", beta0}, {"epsilon", epsilon}};
  rec.columns = {"N_min", "height", "log2_PN", "log2_eps_squared",
                 "N_over_log2_eps_squared", "pn_convention"};
  rec.rows.push_back({detail::leaves(m.size), detail::i64(m.size.height()), m.log2_PN,
                      le * le, m.size.leaves() / (le * le),
                      detail::str(kPnConvention)});
  return rec;
}

inline OutputRecord cmd_montecarlo(const McConfig& config) {
  const McEstimate est = simulate(config);
  double z = 0.0;
  if (est.std_err > 0.0) {
    z = (est.error_rate - est.predicted) / est.std_err;
  } else if (est.error_rate != est.predicted) {
    z = est.error_rate > est.predicted ? INFINITY : -INFINITY;
  }
  OutputRecord rec;
  rec.command = "montecarlo";
  rec.single_result = true;
  rec.inputs = {{"alpha0", config.pair0.alpha.value()},
                {"beta0", config.pair0.beta.value()},
                {"height", detail::i64(config.height)},
                {"trials", detail::u64(config.trials)},
                {"seed", detail::u64(config.seed)},
                {"hypothesis", detail::str(to_string(config.hypothesis))}};
  rec.columns = {"errors", "error_rate", "std_err", "predicted", "z_score"};
  rec.rows.push_back({detail::u64(est.errors), est.error_rate, est.std_err,
                      est.predicted, z});
  return rec;
}

inline OutputRecord cmd_crummy(double c, int height_min, int height_max,
                               double split, CrummySchedule schedule) {
  if (height_min % 2 != 0 || height_max % 2 != 0 || height_min < 0 ||
      height_max < height_min) {
    fail(ErrorCode::InvalidArgument,
         "heights must be even with 0 <= height-min <= height-max");
  }
  std::vector<int> heights;
  for (int h = height_min; h <= height_max; h += 2) heights.push_back(h);
  const CrummyScanResult scan = crummy_scan(c, heights, split, schedule);
  OutputRecord rec;
  rec.command = "crummy";
  rec.inputs = {{"c", c},
                {"height_min", detail::i64(height_min)},
                {"height_max", detail::i64(height_max)},
                {"split", split},
                {"schedule", detail::str(to_string(schedule))}};
  rec.columns = {"N", "height", "eta", "log2_PN", "pn_convention"};
  for (const auto& row : scan.rows) {
    rec.rows.push_back({detail::leaves(row.size), detail::i64(row.size.height()),
                        row.eta, row.log2_PN, detail::str(kPnConvention)});
  }
  return rec;
}

}  // namespace relaytree
