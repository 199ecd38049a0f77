#include "fleet/metrics_io.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"

namespace fleet {

using nlohmann::json;

std::string ticks_csv(const RunMetrics& metrics) {
  std::string out = "time_s,robot_id,role,voltage_v,discharge_mah,x_m,y_m\n";
  out.reserve(out.size() + metrics.ticks.size() * 56);
  for (const TickRecord& r : metrics.ticks) {
    out += fmt::format("{:.3f},{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", r.time_s, r.robot_id, role_name(r.role),
                       r.voltage_v, r.discharge_mah, r.x_m, r.y_m);
  }
  return out;
}

std::string replacements_csv(const RunMetrics& metrics) {
  std::string out =
      "time_s,hub_id,leaving_id,entering_id,leaving_remaining_fraction,entering_remaining_fraction,duration_s\n";
  for (const ReplacementEvent& e : metrics.replacements) {
    out += fmt::format("{:.3f},{},{},{},{:.6f},{:.6f},{:.3f}\n", e.time_s, e.hub_id, e.leaving, e.entering,
                       e.leaving_remaining_fraction, e.entering_remaining_fraction, e.duration_s);
  }
  return out;
}

std::string summary_json(const RunMetrics& metrics, const WorldConfig& config, const std::string& overrides_json) {
  const RunSummary& s = metrics.summary;
  json j = {{"policy", policy_name(config.policy)},
            {"seed", config.seed},
            {"payload_mass_kg", config.payload_mass_kg},
            {"operational_time_s", s.operational_time_s},
            {"sim_time_s", s.sim_time_s},
            {"distance_m", s.distance_m},
            {"waiting_time_s", s.waiting_time_s},
            {"replacement_count", s.replacement_count},
            {"hub_visits", s.hub_visits},
            {"termination", termination_name(s.termination)},
            {"first_threshold_crossing_s",
             s.first_threshold_crossing_s ? json(*s.first_threshold_crossing_s) : json(nullptr)},
            {"derived",
             {{"leg_time_s", metrics.derived.leg_time_s},
              {"nominal_power_w", metrics.derived.nominal_power_w},
              {"r_d_mah", metrics.derived.r_d_mah},
              {"r_c_mah", metrics.derived.r_c_mah},
              {"d_th_mah", metrics.derived.d_th_mah}}},
            {"audit",
             {{"min_supporters", metrics.audit.min_supporters},
              {"conservation_violations", metrics.audit.conservation_violations},
              {"separation_violations", metrics.audit.separation_violations},
              {"max_concurrent_orders", metrics.audit.max_concurrent_orders}}},
            {"overrides", json::parse(overrides_json.empty() ? "{}" : overrides_json)}};
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_run_outputs(const std::string& dir, const RunMetrics& metrics, const WorldConfig& config,
                       const std::string& overrides_json) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_text_file((base / "ticks.csv").string(), ticks_csv(metrics));
  write_text_file((base / "replacements.csv").string(), replacements_csv(metrics));
  write_text_file((base / "summary.json").string(), summary_json(metrics, config, overrides_json));
}

}  // namespace fleet
