#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fleet/battery.hpp"
#include "fleet/drivetrain.hpp"
#include "fleet/formation.hpp"
#include "fleet/trajectory.hpp"

namespace fleet {

enum class PolicyKind { None, Baseline, Optimized };

struct PolicySpec {
  PolicyKind kind = PolicyKind::None;
  // baseline
  double threshold_fraction = 0.30;
  double min_entry_fraction = 0.0;
  // optimized
  int horizon_k = 2;
  double w1 = 1.0;
  double w2 = 0.5;
  double threshold_voltage = 11.5;       // d_th derived from this unless d_th_mah is set
  double threshold_hold_s = 5.0;         // a crossing must persist this long to be reported
  std::optional<double> d_th_mah;
  std::optional<double> r_c_mah;
  std::optional<double> r_d_mah;

  bool operator==(const PolicySpec&) const = default;
};

struct HubSpec {
  int id = 0;
  Point2 position;
  double trigger_radius_m = 0.75;
  std::vector<int> residents;

  bool operator==(const HubSpec&) const = default;
};

struct SupportSpec {
  int id = 0;
  Point2 park;

  bool operator==(const SupportSpec&) const = default;
};

struct FleetEntry {
  int id = 0;
  std::optional<double> initial_discharge_mah;  // drawn from initial_charge when absent
  std::optional<RobotParams> robot;             // overrides WorldConfig::robot
  std::optional<BatteryParams> battery;         // overrides WorldConfig::battery

  bool operator==(const FleetEntry&) const = default;
};

struct InitialChargeRange {
  double min_fraction = 0.6;
  double max_fraction = 1.0;

  bool operator==(const InitialChargeRange&) const = default;
};

struct FormationSpec {
  int leader = 0;
  std::vector<FormationSlot> slots;

  int size() const { return 1 + static_cast<int>(slots.size()); }
  bool operator==(const FormationSpec&) const = default;
};

struct WorldConfig {
  double dt_s = 0.1;
  double max_sim_time_s = 7200.0;
  std::uint64_t seed = 1;
  double payload_mass_kg = 6.0;
  double replacement_time_s = 180.0;
  double wait_recheck_s = 10.0;
  double record_interval_s = 1.0;  // 0 disables per-tick records
  bool idle_drain_while_halted = true;
  double robot_dimension_m = 0.2;

  TrajectorySpec trajectory;
  RobotParams robot;
  BatteryParams battery;
  ControlGains gains;
  InitialChargeRange initial_charge;
  FormationSpec formation;
  std::vector<HubSpec> hubs;
  std::vector<SupportSpec> supports;
  std::vector<FleetEntry> fleet;
  PolicySpec policy;

  void validate() const;
  double min_separation() const { return robot_dimension_m + kLocalizationDelta; }
  RobotParams robot_params(int id) const;
  BatteryParams battery_params(int id) const;
  bool operator==(const WorldConfig&) const = default;
};

/// Command-line overrides applied on top of a parsed config.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> payload_mass_kg;
  std::optional<std::string> policy;  // none | baseline30 | baseline40 | optimized
  std::optional<int> horizon_k;

  bool any() const { return seed || payload_mass_kg || policy || horizon_k; }
};

/// Parses JSON (comments allowed). Missing keys keep built-in defaults.
/// Throws std::invalid_argument on malformed input or failed validation.
WorldConfig parse_config(const std::string& text);
WorldConfig load_config(const std::string& path);
std::string serialize_config(const WorldConfig& config);

void apply_overrides(WorldConfig& config, const ConfigOverrides& overrides);
std::string overrides_to_json(const ConfigOverrides& overrides);

/// Named policies used by the CLI and campaigns.
PolicySpec named_policy(const std::string& name, const PolicySpec& base);
std::string policy_name(const PolicySpec& policy);

std::string read_text_file(const std::string& path);

}  // namespace fleet
