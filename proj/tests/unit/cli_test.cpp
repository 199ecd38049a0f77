#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fleet/config.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kBin = FLEETSIM_BIN;
const std::string kDir = FLEET_CONFIG_DIR;

struct Result {
  int status = -1;
  std::string out;
};

Result sh(const std::string& args) {
  Result r;
  FILE* p = popen((kBin + " " + args).c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch(const char* name) {
  const fs::path d = fs::temp_directory_path() / "fleet_cli_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) { return fleet::read_text_file(p.string()); }

}  // namespace

TEST(CliRun, MinimalConfigWritesThreeFiles) {
  const fs::path out = scratch("run");
  const Result r = sh("run --config " + kDir + "/minimal.json --out " + out.string());
  EXPECT_EQ(r.status, 0) << r.out;
  for (const char* f : {"ticks.csv", "replacements.csv", "summary.json"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  const std::string ticks = slurp(out / "ticks.csv");
  EXPECT_EQ(ticks.substr(0, ticks.find('\n')), "time_s,robot_id,role,voltage_v,discharge_mah,x_m,y_m");
}

TEST(CliRun, MissingConfigFails) {
  const Result r = sh("run --config /nonexistent.json --out " + scratch("missing").string() + " 2>&1");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("nonexistent"), std::string::npos);
}

TEST(CliRun, UsageErrors) {
  EXPECT_EQ(sh("2>/dev/null").status, 1);
  EXPECT_EQ(sh("run --config " + kDir + "/default.json --policy greedy 2>/dev/null").status, 1);
}

TEST(CliRun, OverrideSupersedesFileAndIsEchoed) {
  const fs::path out = scratch("override");
  const Result r = sh("run --config " + kDir + "/minimal.json --payload-mass=6 --seed 4 --out " + out.string());
  ASSERT_EQ(r.status, 0);
  const json s = json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(s.at("overrides").at("payload_mass_kg"), 6.0);
  EXPECT_EQ(s.at("overrides").at("seed"), 4);
  EXPECT_EQ(s.at("payload_mass_kg"), 6.0);
  EXPECT_EQ(s.at("seed"), 4);
  EXPECT_EQ(fleet::load_config(kDir + "/minimal.json").payload_mass_kg, 1.0);
}

TEST(CliRun, TicksAreByteIdenticalAcrossRuns) {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  ASSERT_EQ(sh("run --config " + kDir + "/default.json --out " + a.string()).status, 0);
  ASSERT_EQ(sh("run --config " + kDir + "/default.json --out " + b.string()).status, 0);
  EXPECT_EQ(slurp(a / "ticks.csv"), slurp(b / "ticks.csv"));
  EXPECT_EQ(slurp(a / "replacements.csv"), slurp(b / "replacements.csv"));
}

TEST(CliSolve, TenRobotExample) {
  const Result s = sh("solve " + kDir + "/problems/ten_robot.json");
  ASSERT_EQ(s.status, 0) << s.out;
  const json j = json::parse(s.out);
  EXPECT_EQ(j.at("order").at("leaving"), json::parse("[1]"));
  EXPECT_EQ(j.at("order").at("entering"), json::parse("[2]"));
  EXPECT_EQ(j.at("x"), json::parse("[[0,1,0,1,0,1,0,0,0,0]]"));
}

TEST(CliSolve, FourRobotExampleViaConfigFlag) {
  const Result s = sh("solve --config " + kDir + "/problems/four_robot.json");
  ASSERT_EQ(s.status, 0);
  EXPECT_EQ(json::parse(s.out).at("x"), json::parse("[[0,1,1,0]]"));
}

TEST(CliSolve, AllRobotsNeeded) {
  const fs::path d = scratch("solve_nf");
  std::ofstream(d / "p.json") << R"({"n_robots": 3, "horizon_k": 2, "formation_size_f": 3,
    "d0": [100, 200, 300], "x0": [1, 1, 1], "hub_presence": [[0, 0, 0], [0, 0, 0]],
    "r_c": -50, "r_d": 50, "d_th": 1000})";
  const Result s = sh("solve " + (d / "p.json").string());
  ASSERT_EQ(s.status, 0);
  EXPECT_EQ(json::parse(s.out).at("x"), json::parse("[[1,1,1],[1,1,1]]"));
}

TEST(CliSolve, InfeasibleExitsTwo) {
  const Result s = sh("solve " + kDir + "/problems/infeasible.json");
  EXPECT_EQ(s.status, 2);
  EXPECT_NE(s.out.find("waiting for replacement"), std::string::npos);
}

TEST(CliCalibrate, PrintsCoefficient) {
  const Result s = sh("calibrate");
  ASSERT_EQ(s.status, 0);
  const auto pos = s.out.find("rolling_resist_coeff=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(s.out.substr(pos + 21)), 0.0727, 5e-4);
}

TEST(CliCampaign, AggregatesAreByteIdenticalOnRerun) {
  const fs::path d = scratch("campaign");
  std::ofstream(d / "c.json") << R"({"base_config": ")" << kDir << R"(/default.json",
    "payload_masses": [6], "policies": ["none", "baseline40", "optimized"], "seeds": [1]})";
  const fs::path a = d / "a";
  const fs::path b = d / "b";
  ASSERT_EQ(sh("campaign --config " + (d / "c.json").string() + " --jobs 3 --out " + a.string()).status, 0);
  ASSERT_EQ(sh("campaign --config " + (d / "c.json").string() + " --jobs 1 --out " + b.string()).status, 0);
  for (const char* f : {"operating_time_vs_mass.csv", "replacement_count_vs_mass.csv", "replacement_histogram.csv",
                        "runs.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}
