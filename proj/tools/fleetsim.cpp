// fleetsim: run simulations, campaigns, one-shot schedule solves and the
// drivetrain calibration sweep.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fleet/calibration.hpp"
#include "fleet/campaign.hpp"
#include "fleet/config.hpp"
#include "fleet/engine.hpp"
#include "fleet/metrics_io.hpp"
#include "fleet/schedule_io.hpp"
#include "fleet/scheduler.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInfeasible = 2;

void setup_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FLEET_LOG_LEVEL")) {
    const std::string v(env);
    if (v == "error" || v == "warn" || v == "info" || v == "debug") {
      spdlog::set_level(spdlog::level::from_str(v));
    } else {
      spdlog::warn("ignoring FLEET_LOG_LEVEL={}, expected error|warn|info|debug", v);
    }
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const fleet::ConfigOverrides& overrides) {
  fleet::WorldConfig cfg = fleet::load_config(config_path);
  fleet::apply_overrides(cfg, overrides);
  spdlog::info("run: policy={} payload={} kg seed={}", fleet::policy_name(cfg.policy), cfg.payload_mass_kg, cfg.seed);
  const fleet::RunMetrics m = fleet::run(cfg);
  fleet::write_run_outputs(out_dir, m, cfg, fleet::overrides_to_json(overrides));
  spdlog::info("run: {} after {:.1f} s, operational {:.1f} s, {} replacements",
               fleet::termination_name(m.summary.termination), m.summary.sim_time_s, m.summary.operational_time_s,
               m.summary.replacement_count);
  std::cout << "termination=" << fleet::termination_name(m.summary.termination)
            << " operational_time_s=" << m.summary.operational_time_s
            << " replacements=" << m.summary.replacement_count << "\n";
  return kOk;
}

int cmd_campaign(const std::string& campaign_path, const std::string& out_dir, int jobs) {
  const fleet::CampaignSpec spec = fleet::load_campaign(campaign_path);
  const auto cells = spec.payload_masses.size() * spec.policies.size() * spec.seeds.size();
  spdlog::info("campaign: {} cells on {} jobs", cells, jobs);
  const auto results = fleet::run_campaign(spec, jobs);
  fleet::write_campaign_outputs(out_dir, spec, results);
  std::cout << "cells=" << results.size() << "\n";
  return kOk;
}

int cmd_solve(const std::string& problem_path) {
  const fleet::SolveRequest req = fleet::parse_solve_request(fleet::read_text_file(problem_path));
  const auto sol = fleet::solve(req.problem);
  if (!sol) {
    std::cout << "waiting for replacement\n";
    return kInfeasible;
  }
  const fleet::ReplacementOrder order =
      fleet::diff_solutions(req.problem.x0, sol->x.front(), req.hub_id, req.problem.robot_ids);
  std::cout << fleet::solution_to_json(*sol, order) << "\n";
  return kOk;
}

int cmd_calibrate(const std::optional<std::string>& config_path, double payload, double target_s) {
  fleet::RobotParams robot;
  fleet::BatteryParams battery;
  if (config_path) {
    const fleet::WorldConfig cfg = fleet::load_config(*config_path);
    robot = cfg.robot;
    battery = cfg.battery;
  }
  fleet::CalibrationTarget target;
  target.payload_mass_kg = payload;
  target.target_time_s = target_s;
  const fleet::CalibrationResult r = fleet::calibrate_rolling_resistance(robot, battery, target);
  std::cout << "rolling_resist_coeff=" << r.rolling_resist_coeff << " time_to_" << target.threshold_voltage
            << "V_s=" << r.time_s << " power_w=" << r.power_w << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"fleet payload-transport simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  fleet::ConfigOverrides overrides;
  std::optional<std::uint64_t> seed;
  std::optional<double> payload;
  std::optional<std::string> policy;
  std::optional<int> horizon;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto* run = app.add_subcommand("run", "simulate one configuration");
  run->add_option("--config", config_path, "world config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override seed");
  run->add_option("--payload-mass", payload, "override payload mass (kg)");
  run->add_option("--policy", policy, "none|baseline30|baseline40|optimized");
  run->add_option("--horizon-k", horizon, "override optimizer horizon");

  auto* campaign = app.add_subcommand("campaign", "run a sweep and write aggregate CSVs");
  campaign->add_option("--config", config_path, "campaign file (JSON)")->required();
  campaign->add_option("--out", out_dir, "output directory");
  campaign->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);

  std::string problem_path;
  auto* solve = app.add_subcommand("solve", "solve one scheduling problem");
  solve->add_option("problem", problem_path, "problem record (JSON)");
  solve->add_option("--config", problem_path, "problem record (JSON)");

  std::optional<std::string> calib_config;
  double calib_payload = 6.0;
  double calib_target = 1500.0;
  auto* calibrate = app.add_subcommand("calibrate", "suggest rolling_resist_coeff for the endurance target");
  calibrate->add_option("--config", calib_config, "take robot and battery parameters from this config");
  calibrate->add_option("--payload-mass", calib_payload, "payload carried by five robots (kg)");
  calibrate->add_option("--target-s", calib_target, "seconds from full charge to 11.5 V");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  overrides.seed = seed;
  overrides.payload_mass_kg = payload;
  overrides.policy = policy;
  overrides.horizon_k = horizon;

  try {
    if (*run) return cmd_run(config_path, out_dir, overrides);
    if (*campaign) return cmd_campaign(config_path, out_dir, jobs);
    if (*solve) {
      if (problem_path.empty()) {
        std::cerr << "solve: a problem file is required\n";
        return kUsage;
      }
      return cmd_solve(problem_path);
    }
    if (*calibrate) return cmd_calibrate(calib_config, calib_payload, calib_target);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
