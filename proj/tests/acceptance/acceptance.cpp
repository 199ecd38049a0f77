// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria (capped at 255).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>
#include <json.hpp>

#include "fleet/battery.hpp"
#include "fleet/campaign.hpp"
#include "fleet/config.hpp"
#include "fleet/engine.hpp"
#include "fleet/formation.hpp"
#include "fleet/scheduler.hpp"
#include "fleet/trajectory.hpp"
#include "schedule_oracle.hpp"

namespace fs = std::filesystem;
using namespace fleet;

namespace {

const std::string kConfigs = FLEET_CONFIG_DIR;
const std::string kBin = FLEETSIM_BIN;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// runs a shell command, returns (exit status, stdout)
std::pair<int, std::string> capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, out};
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

int jobs() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// ---- shared campaign --------------------------------------------------------

struct LargeCampaign {
  CampaignSpec spec;
  std::vector<CellResult> results;
  double runtime_s = 0.0;

  std::vector<const CellResult*> cells(double mass, const std::string& policy) const {
    std::vector<const CellResult*> out;
    for (const CellResult& r : results) {
      if (r.cell.payload_mass_kg == mass && r.cell.policy == policy) out.push_back(&r);
    }
    return out;  // seed order
  }
};

const LargeCampaign& large_campaign() {
  static const LargeCampaign c = [] {
    LargeCampaign p;
    p.spec = load_campaign(kConfigs + "/campaign_large.json");
    const auto t0 = Clock::now();
    p.results = run_campaign(p.spec, jobs());
    p.runtime_s = seconds_since(t0);
    return p;
  }();
  return c;
}

// ---- criteria -----------------------------------------------------------------

Outcome battery_anchor() {
  const auto t0 = Clock::now();
  const BatteryParams b;
  const double v0 = voltage_curve(b, 0.0);
  bool ok = v0 == 12.0;
  int bad = 0;
  for (int d = 0; d <= 1200; ++d) {
    const double v = voltage_curve(b, d);
    if (!std::isfinite(v) || !(v > 0.0)) ++bad;
  }
  const double t = seconds_since(t0);
  ok = ok && bad == 0 && t < 1.0;
  return {ok, fmt::format("V(0)={:.17g}, bad samples {}, {:.3f} s", v0, bad, t)};
}

Outcome mass_endurance() {
  const auto t0 = Clock::now();
  const WorldConfig base = load_config(kConfigs + "/endurance.json");
  const std::vector<double> masses{1, 6, 12, 18};
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::vector<std::optional<double>> times;
    for (double m : masses) {
      WorldConfig c = base;
      c.seed = seed;
      c.payload_mass_kg = m;
      times.push_back(run(c).summary.first_threshold_crossing_s);
    }
    bool seed_ok = std::all_of(times.begin(), times.end(), [](const auto& t) { return t.has_value(); });
    for (std::size_t i = 1; seed_ok && i < times.size(); ++i) seed_ok = *times[i] < *times[i - 1];
    ok = ok && seed_ok;
    detail += fmt::format("seed {}:", seed);
    for (const auto& t : times) detail += t ? fmt::format(" {:.1f}", *t) : std::string(" none");
    detail += seed_ok ? "; " : " (not decreasing); ";
  }
  const double t = seconds_since(t0);
  ok = ok && t < 60.0;
  return {ok, detail + fmt::format("{:.1f} s", t)};
}

Outcome policy_ordering() {
  const LargeCampaign& c = large_campaign();
  const WorldConfig& w = c.spec.base;
  const int scheduled = static_cast<int>(w.fleet.size() - w.supports.size());
  const bool shape = scheduled == 12 && w.hubs.size() == 3 && w.formation.size() == 3 && w.policy.horizon_k == 2;
  auto op = [&](const std::string& p) {
    std::vector<double> v;
    for (const CellResult* r : c.cells(w.payload_mass_kg, p)) v.push_back(r->metrics.summary.operational_time_s);
    return v;
  };
  const auto none = op("none"), b40 = op("baseline40"), b30 = op("baseline30"), opt = op("optimized");
  const double mn = mean(none), m40 = mean(b40), m30 = mean(b30), mo = mean(opt);
  const bool enough = none.size() >= 5 && b40.size() >= 5 && b30.size() >= 5 && opt.size() >= 5;
  const bool ok = shape && enough && mn < m40 && m40 <= m30 && m30 < mo && mo >= 1.5 * mn && c.runtime_s < 300.0;
  return {ok, fmt::format("{} kg, {} seeds: none {:.0f} < b40 {:.0f} <= b30 {:.0f} < opt {:.0f}, opt/none {:.2f}; "
                          "campaign of {} runs in {:.1f} s",
                          w.payload_mass_kg, none.size(), mn, m40, m30, mo, mo / mn, c.results.size(), c.runtime_s)};
}

Outcome replacement_counts() {
  const LargeCampaign& c = large_campaign();
  const double m = c.spec.base.payload_mass_kg;
  const auto b30 = c.cells(m, "baseline30"), b40 = c.cells(m, "baseline40"), opt = c.cells(m, "optimized");
  bool ok = !b30.empty() && b30.size() == b40.size();
  std::string per_seed;
  std::vector<double> n30, nopt;
  for (std::size_t i = 0; ok && i < b30.size(); ++i) {
    const int a = b30[i]->metrics.summary.replacement_count;
    const int b = b40[i]->metrics.summary.replacement_count;
    per_seed += fmt::format(" {}<={}", a, b);
    ok = ok && a <= b;
    n30.push_back(a);
  }
  for (const CellResult* r : opt) nopt.push_back(r->metrics.summary.replacement_count);
  ok = ok && mean(nopt) >= mean(n30);
  return {ok, fmt::format("b30<=b40 per seed:{}; mean opt {:.1f} >= mean b30 {:.1f}", per_seed, mean(nopt), mean(n30))};
}

Outcome replacement_distribution() {
  const LargeCampaign& c = large_campaign();
  double worst_b30 = 0.0;
  double best_opt = 0.0;
  long b30_events = 0;
  long opt_events = 0;
  for (const CellResult& r : c.results) {
    for (const ReplacementEvent& e : r.metrics.replacements) {
      if (r.cell.policy == "baseline30") {
        worst_b30 = std::max(worst_b30, e.leaving_remaining_fraction);
        ++b30_events;
      } else if (r.cell.policy == "optimized") {
        best_opt = std::max(best_opt, e.leaving_remaining_fraction);
        ++opt_events;
      }
    }
  }
  const bool ok = b30_events > 0 && worst_b30 <= 0.31 && best_opt > 0.5;
  return {ok, fmt::format("baseline30 max leaving fraction {:.3f} over {} events; optimized max {:.3f} over {} events",
                          worst_b30, b30_events, best_opt, opt_events)};
}

Outcome solver_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20261016);
  int checked = 0;
  int mismatches = 0;
  int infeasible_skipped = 0;
  while (checked < 100) {
    const ScheduleProblem p = oracle::random_problem(rng, 8, 2);
    const oracle::Enumerated e = oracle::enumerate(p);
    if (!e.best) {
      ++infeasible_skipped;
      if (solve(p)) ++mismatches;
      continue;
    }
    const auto sol = solve(p);
    if (!sol || sol->objective_value != e.value || !feasible(p, sol->x) || !oracle::ref_feasible(p, sol->x)) {
      ++mismatches;
    }
    ++checked;
  }
  const double t = seconds_since(t0);
  return {mismatches == 0 && t < 30.0, fmt::format("{} feasible instances, {} mismatches, {} infeasible draws, {:.2f} s",
                                                   checked, mismatches, infeasible_skipped, t)};
}

Outcome encoding_soundness() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> real(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    ScheduleProblem p = oracle::random_problem(rng, 10, 3);
    for (double& d : p.d0) d = real(rng) * 1200.0;
    p.r_d = 10.0 + real(rng) * 140.0;
    p.r_c = -real(rng) * 150.0;
    p.w1 = real(rng) * 3.0;
    p.w2 = real(rng) * 100.0;
    std::vector<Assignment> xs;
    for (int j = 0; j < p.horizon_k; ++j) {
      Assignment x(static_cast<std::size_t>(p.n_robots));
      for (int& v : x) v = real(rng) < 0.5 ? 1 : 0;
      xs.push_back(x);
    }
    const QuadraticProgram qp = build_qp(p);
    const double encoded = objective_value(qp.P, qp.Q, flatten(xs));
    const double direct = oracle::ref_objective(p, xs);
    const double scale = std::max({1.0, std::abs(direct), std::abs(encoded)});
    worst = std::max(worst, std::abs(encoded - direct) / scale);
  }
  return {worst <= 1e-9, fmt::format("1000 sequences, worst relative gap {:.3g}", worst)};
}

Outcome ten_robot_example() {
  const auto [status, out] = capture(kBin + " solve " + kConfigs + "/problems/ten_robot.json");
  if (status != 0) return {false, fmt::format("exit status {}", status)};
  try {
    const auto j = nlohmann::json::parse(out);
    const auto leaving = j.at("order").at("leaving").get<std::vector<int>>();
    const auto entering = j.at("order").at("entering").get<std::vector<int>>();
    const bool ok = leaving == std::vector<int>{1} && entering == std::vector<int>{2};
    return {ok, fmt::format("leaving {}, entering {}", nlohmann::json(leaving).dump(), nlohmann::json(entering).dump())};
  } catch (const std::exception& ex) {
    return {false, std::string("unreadable output: ") + ex.what()};
  }
}

Outcome formation_convergence() {
  const ControlGains g;
  const RobotParams rp;
  const TrajectorySpec traj;
  const double dt = 0.1;
  const int steps = static_cast<int>(std::lround(120.0 / dt));
  double worst = 0.0;
  int cases = 0;
  for (const FormationSlot& s : default_square_slots()) {
    for (double r : {0.1, 0.2, 0.3}) {
      for (int k = 0; k < 16; ++k) {
        const double dir = k * std::numbers::pi / 8;
        LeaderCommand lc = leader_command(0.0, traj);
        const Pose target = slot_world_target(lc.pose, s);
        const double th = lc.pose.theta;
        const double d = g.center_offset_d_m;
        Pose f{target.x + r * std::cos(dir) - d * std::cos(th), target.y + r * std::sin(dir) - d * std::sin(th), th};
        ControllerState st;
        for (int i = 0; i < steps; ++i) {
          const FollowerOutput out = follower_command(lc.pose, lc.vel, f, s, g, st, dt);
          st = out.state;
          f = integrate_kinematics(f, out.cmd, rp, dt);
          lc = leader_command((i + 1) * dt, traj);
        }
        worst = std::max(worst, slot_error(lc.pose, f, s, g.center_offset_d_m));
        ++cases;
      }
    }
  }
  bool zero = true;
  for (const FormationSlot& s : default_square_slots()) {
    const Pose leader{0.4, -0.3, 0.7};
    const Pose t = slot_world_target(leader, s);
    const double d = g.center_offset_d_m;
    const Pose f{t.x - d * std::cos(leader.theta), t.y - d * std::sin(leader.theta), leader.theta};
    const FollowerOutput out = follower_command(leader, {0.0, 0.0}, f, s, g, {}, dt);
    zero = zero && out.cmd.v == 0.0 && out.cmd.w == 0.0;
  }
  const bool ok = worst < 2.0 * kLocalizationDelta && zero;
  return {ok, fmt::format("{} starts, worst error at 120 s {:.4f} m; equilibrium command {}", cases, worst,
                          zero ? "exactly zero" : "nonzero")};
}

Outcome fsm_safety() {
  std::vector<CellResult> all = large_campaign().results;
  const CampaignSpec small = load_campaign(kConfigs + "/campaign_small.json");
  const auto more = run_campaign(small, jobs());
  all.insert(all.end(), more.begin(), more.end());
  long low_support = 0, conservation = 0, bad_swaps = 0, swaps = 0;
  for (const CellResult& r : all) {
    const WorldConfig& c = r.cell.config;
    if (r.metrics.audit.min_supporters < c.formation.size()) ++low_support;
    conservation += r.metrics.audit.conservation_violations;
    for (double d : r.metrics.audit.swap_durations_s) {
      ++swaps;
      if (std::abs(d - c.replacement_time_s) > c.dt_s + 1e-9) ++bad_swaps;
    }
  }
  const bool ok = swaps > 0 && low_support == 0 && conservation == 0 && bad_swaps == 0;
  return {ok, fmt::format("{} runs: {} below F, {} conservation violations, {}/{} swaps off 180 s", all.size(),
                          low_support, conservation, bad_swaps, swaps)};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / fmt::format("fleet_acceptance_{}", ::getpid());
  fs::remove_all(root);
  std::vector<std::string> ticks;
  for (const char* name : {"a", "b"}) {
    const fs::path dir = root / name;
    const auto [status, out] =
        capture(fmt::format("{} run --config {}/default.json --seed 3 --out {} 2>&1", kBin, kConfigs, dir.string()));
    if (status != 0) return {false, fmt::format("run exited {}: {}", status, out)};
    ticks.push_back(slurp(dir / "ticks.csv"));
  }
  fs::remove_all(root);
  const bool ok = !ticks[0].empty() && ticks[0] == ticks[1];
  return {ok, fmt::format("ticks.csv {} bytes, {}", ticks[0].size(), ok ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"battery curve anchor", battery_anchor},
      {"mass-endurance monotonicity", mass_endurance},
      {"policy ordering", policy_ordering},
      {"replacement counts", replacement_counts},
      {"replacement charge distribution", replacement_distribution},
      {"solver exactness", solver_exactness},
      {"encoding soundness", encoding_soundness},
      {"ten-robot worked example", ten_robot_example},
      {"formation convergence", formation_convergence},
      {"replacement FSM safety", fsm_safety},
      {"determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.pass) ++failed;
    std::cout << fmt::format("[{}] {:2d} {}: {}", o.pass ? "PASS" : "FAIL", index, name, o.detail) << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return std::min(failed, 255);
}
