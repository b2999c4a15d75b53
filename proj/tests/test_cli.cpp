#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "relaytree/cli.hpp"

using namespace relaytree;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cell += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// Runs the installed binary through the shell and captures stdout.
std::string run_binary(const std::string& args) {
  const std::string cmd = std::string(RELAYTREE_CLI_PATH) + " " + args + " 2>&1";
  std::FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "<popen failed>";
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  pclose(pipe);
  return out;
}

double cell_value(const std::string& s) {
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

TEST(CliEvolve, Examples) {
  Outcome r = run({"evolve", "--alpha0", "0.1", "--beta0", "0.2", "--levels", "2",
               "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"k", "alpha", "beta", "log2_alpha",
                                               "log2_beta", "log2_L", "side",
                                               "b_index", "in_R", "in_S"}));
  EXPECT_NEAR(cell_value(rows[3][1]), 0.0361, 1e-15);
  EXPECT_NEAR(cell_value(rows[3][2]), 0.0784, 1e-15);
  EXPECT_NEAR(cell_value(rows[3][5]), -3.1265804965651431, 1e-14);

  r = run({"evolve", "--alpha0", "0", "--beta0", "0", "--levels", "1"});
  ASSERT_EQ(r.code, 0);
  const auto zeros = parse_csv(r.out);
  ASSERT_EQ(zeros.size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_EQ(zeros[i][1], "0");
    EXPECT_EQ(zeros[i][2], "0");
    EXPECT_EQ(zeros[i][3], "-inf");
    EXPECT_EQ(zeros[i][5], "-inf");
  }

  r = run({"evolve", "--alpha0", "1.5", "--beta0", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(CliEvolve, LeavesAlias) {
  const Outcome a = run({"evolve", "--alpha0", "0.1", "--beta0", "0.2", "--leaves", "8"});
  const Outcome b = run({"evolve", "--alpha0", "0.1", "--beta0", "0.2", "--height", "3"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(run({"evolve", "--alpha0", "0.1", "--beta0", "0.2", "--leaves", "6"}).code, 2);
}

TEST(CliRegions, Examples) {
  Outcome r = run({"regions", "--resolution", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"alpha", "beta", "side", "b_index",
                                               "in_R", "in_S"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"0", "0", "UpperTriangle", "1",
                                               "true", "true"}));
  bool found = false;
  for (const auto& row : rows) {
    if (row[0] == "0.25" && row[1] == "0.25") {
      EXPECT_EQ(row[3], "1");
      found = true;
    }
    if (cell_value(row[0]) + cell_value(row[1]) >= 1.0) {
      EXPECT_EQ(row[3], "");
    }
  }
  EXPECT_TRUE(found);

  r = run({"regions", "--resolution", "400"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 160001);

  EXPECT_EQ(run({"regions", "--resolution", "1"}).code, 2);
  EXPECT_EQ(run({"regions", "--resolution", "4097"}).code, 2);
}

TEST(CliRatios, Examples) {
  struct Case {
    const char* region;
    const char* kind;
    double lo, hi;
  };
  const Case cases[] = {{"Bm", "step1_sq", 1, 2},
                        {"B1", "step2_sq", 1, 2},
                        {"U", "step1_lin", 0, 1},
                        {"B2RU", "step2_sq", 1, 2}};
  for (const Case& c : cases) {
    const Outcome r = run({"ratios", "--region", c.region, "--kind", c.kind,
                       "--resolution", "200"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_GT(rows.size(), 10u) << c.region;
    EXPECT_EQ(rows[0], (std::vector<std::string>{"alpha", "beta", "ratio"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double v = cell_value(rows[i][2]);
      ASSERT_GE(v, c.lo * (1 - 1e-12)) << c.region << " row " << i;
      ASSERT_LE(v, c.hi * (1 + 1e-12)) << c.region << " row " << i;
    }
  }
  EXPECT_EQ(run({"ratios", "--region", "Bm", "--kind", "step1_lin"}).code, 2);
  EXPECT_EQ(run({"ratios", "--region", "Xx", "--kind", "step1_sq"}).code, 2);
}

TEST(CliBounds, Examples) {
  Outcome r = run({"bounds", "--alpha0", "0.1", "--beta0", "0.2", "--leaves", "4",
               "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["command"], "bounds");
  const auto& res = doc["result"];
  EXPECT_EQ(res["theorem"], "Theorem1");
  EXPECT_NEAR(res["exact_log2_PN_inv"].get<double>(), 3.127, 1e-3);
  EXPECT_NEAR(res["lower"].get<double>(), 2.474, 1e-3);
  EXPECT_NEAR(res["upper"].get<double>(), 3.474, 1e-3);
  EXPECT_EQ(res["ok"], true);
  EXPECT_TRUE(res.contains("lower_clamped"));
  EXPECT_TRUE(res.contains("pn_convention"));

  r = run({"bounds", "--alpha0", "0.05", "--beta0", "0.9", "--leaves", "4",
           "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["result"]["theorem"], "Corollary1");

  r = run({"bounds", "--alpha0", "0.6", "--beta0", "0.5", "--leaves", "4"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("NotInTriangle"), std::string::npos);
  EXPECT_EQ(run({"bounds", "--alpha0", "0.1", "--beta0", "0.2", "--leaves", "1"}).code, 2);
  EXPECT_EQ(run({"bounds", "--alpha0", "0.1", "--beta0", "0.2", "--leaves", "12"}).code, 2);
}

TEST(CliMinSensors, Examples) {
  Outcome r = run({"min-sensors", "--alpha0", "0.1", "--beta0", "0.2", "--epsilon",
               "0.01", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["result"]["N_min"], 64);
  r = run({"min-sensors", "--alpha0", "0.1", "--beta0", "0.2", "--epsilon", "0.5",
           "--format", "json"});
  EXPECT_EQ(nlohmann::json::parse(r.out)["result"]["N_min"], 1);
  EXPECT_EQ(run({"min-sensors", "--alpha0", "0.1", "--beta0", "0.2", "--epsilon",
                 "0"}).code,
            2);
  EXPECT_EQ(run({"min-sensors", "--alpha0", "0.7", "--beta0", "0.4", "--epsilon",
                 "0.1"}).code,
            3);
}

TEST(CliMontecarlo, Examples) {
  Outcome r = run({"montecarlo", "--alpha0", "0.1", "--beta0", "0.2", "--height", "10",
               "--trials", "100000", "--seed", "7", "--hypothesis", "H0",
               "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto res = nlohmann::json::parse(r.out)["result"];
  EXPECT_NEAR(res["predicted"].get<double>(), 6.5405620875540033e-15, 1e-27);
  EXPECT_TRUE(res.contains("z_score"));

  r = run({"montecarlo", "--alpha0", "0.3", "--beta0", "0.4", "--height", "6",
           "--trials", "100000", "--seed", "7", "--hypothesis", "H1",
           "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  res = nlohmann::json::parse(r.out)["result"];
  EXPECT_LE(std::fabs(res["z_score"].get<double>()), 4.0);

  r = run({"montecarlo", "--alpha0", "0", "--beta0", "0", "--height", "5",
           "--trials", "1000", "--seed", "1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["result"]["error_rate"].get<double>(), 0.0);

  EXPECT_EQ(run({"montecarlo", "--alpha0", "0.1", "--beta0", "0.2", "--height",
                 "30"}).code,
            2);
  EXPECT_EQ(run({"montecarlo", "--alpha0", "0.1", "--beta0", "0.2", "--height",
                 "4", "--hypothesis", "H2"}).code,
            2);
}

TEST(CliCrummy, Schedules) {
  auto log2_pn = [](const std::string& schedule) {
    const Outcome r = run({"crummy", "--c", "4", "--height-min", "10", "--height-max",
                       "22", "--split", "0.5", "--schedule", schedule});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    EXPECT_EQ(rows[0][0], "N");
    std::vector<double> v;
    for (std::size_t i = 1; i < rows.size(); ++i) v.push_back(cell_value(rows[i][3]));
    return v;
  };
  const auto linear = log2_pn("inv-linear");
  ASSERT_EQ(linear.size(), 7u);
  EXPECT_GT(linear.back(), -0.01);
  const auto quarter = log2_pn("inv-quarter");
  EXPECT_LT(quarter.back(), -50);
  const auto sqrt_rows = log2_pn("inv-sqrt");
  EXPECT_LT(std::fabs(sqrt_rows[6] - sqrt_rows[5]),
            std::fabs(sqrt_rows[1] - sqrt_rows[0]));

  EXPECT_EQ(run({"crummy", "--c", "40", "--height-min", "10"}).code, 2);
  EXPECT_EQ(run({"crummy", "--height-min", "11"}).code, 2);
  EXPECT_EQ(run({"crummy", "--schedule", "cubic"}).code, 2);
}

TEST(CliUsage, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"evolve", "--beta0", "0.2"}).code, 2);
  EXPECT_EQ(run({"evolve", "--alpha0", "x", "--beta0", "0.2"}).code, 2);
  EXPECT_EQ(run({"evolve", "--alpha0", "0.1", "--beta0", "0.2", "--format", "xml"}).code, 2);
  const Outcome help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("montecarlo"), std::string::npos);
}

TEST(CliFormats, CsvAndJsonCarrySameNumbers) {
  const std::vector<std::vector<std::string>> invocations{
      {"evolve", "--alpha0", "0.1", "--beta0", "0.2", "--levels", "25"},
      {"evolve", "--alpha0", "0", "--beta0", "0", "--levels", "2"},
      {"ratios", "--region", "U", "--kind", "step1_sq", "--resolution", "30"},
      {"bounds", "--alpha0", "0.05", "--beta0", "0.9", "--leaves", "128"},
      {"min-sensors", "--alpha0", "0.1", "--beta0", "0.2", "--epsilon", "1e-30"},
      {"montecarlo", "--alpha0", "0.3", "--beta0", "0.4", "--height", "5",
       "--trials", "2000", "--seed", "3"},
      {"crummy", "--schedule", "inv-sqrt"},
  };
  for (auto args : invocations) {
    auto csv_args = args;
    csv_args.insert(csv_args.end(), {"--format", "csv"});
    args.insert(args.end(), {"--format", "json"});
    const Outcome csv = run(csv_args);
    const Outcome json = run(args);
    ASSERT_EQ(csv.code, 0) << csv.err;
    ASSERT_EQ(json.code, 0) << json.err;
    const auto rows = parse_csv(csv.out);
    const auto doc = nlohmann::json::parse(json.out);
    std::vector<nlohmann::json> objects;
    if (doc.contains("result")) {
      objects.push_back(doc["result"]);
    } else {
      for (const auto& o : doc["rows"]) objects.push_back(o);
    }
    ASSERT_EQ(objects.size() + 1, rows.size()) << args[0];
    for (std::size_t i = 0; i < objects.size(); ++i) {
      for (std::size_t c = 0; c < rows[0].size(); ++c) {
        const auto& value = objects[i][rows[0][c]];
        const std::string& cell = rows[i + 1][c];
        if (value.is_number()) {
          ASSERT_EQ(value.get<double>(), cell_value(cell))
              << args[0] << " " << rows[0][c];
        } else if (value.is_string()) {
          ASSERT_EQ(value.get<std::string>(), cell) << args[0] << " " << rows[0][c];
        } else if (value.is_boolean()) {
          ASSERT_EQ(value.get<bool>() ? "true" : "false", cell);
        } else {
          ASSERT_TRUE(value.is_null());
          ASSERT_EQ(cell, "");
        }
      }
    }
  }
}

TEST(CliBinary, RepeatedRunsAreByteIdentical) {
  for (const char* args :
       {"evolve --alpha0 0.1 --beta0 0.2 --levels 30 --format json",
        "regions --resolution 50",
        "montecarlo --alpha0 0.3 --beta0 0.4 --height 8 --trials 5000 --seed 9 --workers 3",
        "crummy --schedule inv-quarter --format json"}) {
    const std::string a = run_binary(args);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, run_binary(args)) << args;
  }
}

TEST(CliBinary, OutWritesFileAndNothingToStdout) {
  const auto path =
      std::filesystem::temp_directory_path() / "relaytree_cli_out_test.csv";
  std::filesystem::remove(path);
  const std::string printed =
      run_binary("evolve --alpha0 0.1 --beta0 0.2 --levels 2 --out " + path.string());
  EXPECT_TRUE(printed.empty()) << printed;
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(),
            run({"evolve", "--alpha0", "0.1", "--beta0", "0.2", "--levels", "2"}).out);
  std::filesystem::remove(path);
}

TEST(CliBinary, ExitCodesFromProcess) {
  const auto status = [](const std::string& args) {
    const std::string cmd =
        std::string(RELAYTREE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  EXPECT_EQ(status("evolve --alpha0 0.1 --beta0 0.2"), 0);
  EXPECT_EQ(status("evolve --alpha0 1.5 --beta0 0"), 2);
  EXPECT_EQ(status("bounds --alpha0 0.6 --beta0 0.5 --leaves 4"), 3);
}
