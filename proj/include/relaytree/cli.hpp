#pragma once

// Command-line driver. Exit codes: 0 success, 2 usage or validation error,
// 3 domain precondition not met.

#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relaytree/commands.hpp"

namespace relaytree {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;

inline int exit_code_for(ErrorCode code) {
  return code == ErrorCode::InvalidArgument ? kExitUsage : kExitDomain;
}

namespace detail {

struct CommonFlags {
  Format format = Format::Csv;
  std::string out_path;
};

inline void add_common(CLI::App* cmd, CommonFlags& flags) {
  static const std::map<std::string, Format> kFormats{{"csv", Format::Csv},
                                                      {"json", Format::Json}};
  cmd->add_option("--format", flags.format, "csv or json")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  cmd->add_option("--out", flags.out_path, "write output to this file");
}

// Either --height or --leaves; exactly one when `required`.
struct SizeFlags {
  int height = -1;
  std::uint64_t leaves = 0;
  CLI::Option* height_opt = nullptr;
  CLI::Option* leaves_opt = nullptr;

  TreeSize resolve(int fallback_height = -1) const {
    if (leaves_opt->count() > 0) return TreeSize::from_leaves(leaves);
    if (height_opt->count() > 0) return TreeSize::from_height(height);
    if (fallback_height >= 0) return TreeSize::from_height(fallback_height);
    fail(ErrorCode::InvalidArgument, "one of --height or --leaves is required");
  }
};

inline void add_size(CLI::App* cmd, SizeFlags& flags, const std::string& height_names) {
  flags.height_opt = cmd->add_option(height_names, flags.height, "tree height h");
  flags.leaves_opt = cmd->add_option("--leaves", flags.leaves,
                                     "leaf count N (power of two)");
  flags.height_opt->excludes(flags.leaves_opt);
}

}  // namespace detail

/// Parses `args` (without the program name), runs the subcommand and writes
/// the rendered record to `out` or to --out.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Error-probability dynamics of balanced binary relay trees", "relaytree"};
  app.require_subcommand(1);

  detail::CommonFlags common;
  std::function<OutputRecord()> action;
  double alpha0 = 0.0;
  double beta0 = 0.0;

  auto add_pair = [&](CLI::App* cmd) {
    cmd->add_option("--alpha0", alpha0, "sensor Type I error")->required();
    cmd->add_option("--beta0", beta0, "sensor Type II error")->required();
  };

  // evolve
  detail::SizeFlags evolve_size;
  auto* evolve_cmd = app.add_subcommand("evolve", "trajectory of (alpha_k, beta_k)");
  add_pair(evolve_cmd);
  detail::add_size(evolve_cmd, evolve_size, "--levels,--height");
  detail::add_common(evolve_cmd, common);
  evolve_cmd->callback([&] {
    action = [&] {
      return cmd_evolve(alpha0, beta0, evolve_size.resolve(10).height());
    };
  });

  // regions
  int resolution = 0;
  auto* regions_cmd = app.add_subcommand("regions", "region tags on a grid");
  regions_cmd->add_option("--resolution", resolution, "grid points per axis")->required();
  detail::add_common(regions_cmd, common);
  regions_cmd->callback([&] { action = [&] { return cmd_regions(resolution); }; });

  // ratios
  RatioRegion ratio_region = RatioRegion::U;
  RatioKind ratio_kind = RatioKind::Step1Sq;
  auto* ratios_cmd = app.add_subcommand("ratios", "error-ratio data over a region");
  const std::map<std::string, RatioRegion> regions_map{
      {"Bm", RatioRegion::Bm}, {"B1", RatioRegion::B1}, {"B2RU", RatioRegion::B2RU},
      {"U", RatioRegion::U}, {"fB2RU", RatioRegion::FB2RU}};
  const std::map<std::string, RatioKind> kinds_map{
      {"step1_sq", RatioKind::Step1Sq}, {"step2_sq", RatioKind::Step2Sq},
      {"step1_lin", RatioKind::Step1Lin}};
  ratios_cmd->add_option("--region", ratio_region, "Bm, B1, B2RU, U or fB2RU")
      ->required()
      ->transform(CLI::CheckedTransformer(regions_map));
  ratios_cmd->add_option("--kind", ratio_kind, "step1_sq, step2_sq or step1_lin")
      ->required()
      ->transform(CLI::CheckedTransformer(kinds_map));
  ratios_cmd->add_option("--resolution", resolution, "grid points per axis")
      ->default_val(200);
  detail::add_common(ratios_cmd, common);
  ratios_cmd->callback([&] {
    action = [&] { return cmd_ratios(ratio_region, ratio_kind, resolution); };
  });

  // bounds
  detail::SizeFlags bounds_size;
  auto* bounds_cmd = app.add_subcommand("bounds", "dispatched bounds on log2 P_N^-1");
  add_pair(bounds_cmd);
  detail::add_size(bounds_cmd, bounds_size, "--height");
  detail::add_common(bounds_cmd, common);
  bounds_cmd->callback([&] {
    action = [&] { return cmd_bounds(alpha0, beta0, bounds_size.resolve()); };
  });

  // min-sensors
  double epsilon = 0.0;
  auto* min_cmd = app.add_subcommand("min-sensors", "smallest N with P_N <= epsilon");
  add_pair(min_cmd);
  min_cmd->add_option("--epsilon", epsilon, "target P_N")->required();
  detail::add_common(min_cmd, common);
  min_cmd->callback([&] {
    action = [&] { return cmd_min_sensors(alpha0, beta0, epsilon); };
  });

  // montecarlo
  detail::SizeFlags mc_size;
  McConfig mc;
  std::string hypothesis = "H0";
  auto* mc_cmd = app.add_subcommand("montecarlo", "simulate the relay tree");
  add_pair(mc_cmd);
  detail::add_size(mc_cmd, mc_size, "--height");
  mc_cmd->add_option("--trials", mc.trials, "number of trees")->default_val(100000);
  mc_cmd->add_option("--seed", mc.seed, "master seed")->default_val(0);
  mc_cmd->add_option("--hypothesis", hypothesis, "H0 or H1")
      ->check(CLI::IsMember({"H0", "H1"}));
  mc_cmd->add_option("--workers", mc.workers, "threads (0 = all cores)")->default_val(1);
  detail::add_common(mc_cmd, common);
  mc_cmd->callback([&] {
    action = [&] {
      mc.pair0 = ErrorPair::from_values(alpha0, beta0);
      mc.height = mc_size.resolve().height();
      mc.hypothesis = hypothesis == "H1" ? Hypothesis::H1 : Hypothesis::H0;
      return cmd_montecarlo(mc);
    };
  });

  // crummy
  double crummy_c = 4.0;
  int height_min = 10;
  int height_max = 22;
  double split = 0.5;
  CrummySchedule schedule = CrummySchedule::InvSqrt;
  const std::map<std::string, CrummySchedule> schedules{
      {"inv-sqrt", CrummySchedule::InvSqrt}, {"inv-quarter", CrummySchedule::InvQuarter},
      {"inv-linear", CrummySchedule::InvLinear}, {"constant", CrummySchedule::Constant}};
  auto* crummy_cmd = app.add_subcommand("crummy", "root error for sensors with L0 -> 1");
  crummy_cmd->add_option("--c", crummy_c, "schedule constant")->default_val(4.0);
  crummy_cmd->add_option("--height-min", height_min, "smallest even height")->default_val(10);
  crummy_cmd->add_option("--height-max", height_max, "largest even height")->default_val(22);
  crummy_cmd->add_option("--split", split, "alpha0 share of L0")->default_val(0.5);
  crummy_cmd->add_option("--schedule", schedule,
                         "inv-sqrt (c/sqrt N), inv-quarter (c N^-1/4), inv-linear (c/N), constant")
      ->transform(CLI::CheckedTransformer(schedules));
  detail::add_common(crummy_cmd, common);
  crummy_cmd->callback([&] {
    action = [&] {
      return cmd_crummy(crummy_c, height_min, height_max, split, schedule);
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "relaytree: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const std::string text = render(action(), common.format);
    if (common.out_path.empty()) {
      out << text;
    } else {
      std::ofstream file(common.out_path, std::ios::binary);
      if (!file) {
        err << "relaytree: cannot open " << common.out_path << '\n';
        return kExitUsage;
      }
      file << text;
    }
  } catch (const Error& e) {
    err << "relaytree: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitOk;
}

}  // namespace relaytree
