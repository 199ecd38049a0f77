#include "fleet/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fleet {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) {
    throw std::invalid_argument(where + ": expected an object");
  }
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; })) {
      throw std::invalid_argument(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    out = j.at(key).get<T>();
  }
}

template <typename T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) {
    out = j.at(key).get<T>();
  }
}

Point2 point_from(const json& j) {
  if (j.is_array() && j.size() == 2) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw std::invalid_argument("points are written as [x, y]");
}

json point_to(const Point2& p) { return json::array({p.x, p.y}); }

RobotParams robot_from(const json& j, RobotParams r) {
  reject_unknown(j,
                 {"wheel_radius_m", "wheel_base_m", "chassis_mass_kg", "wheel_mass_kg", "torque_const_kt",
                  "back_emf_ke", "armature_resistance_r", "no_load_current_i0", "damping_b",
                  "motor_efficiency_eta", "rolling_resist_coeff", "center_offset_d_m"},
                 "robot");
  read(j, "wheel_radius_m", r.wheel_radius_m);
  read(j, "wheel_base_m", r.wheel_base_m);
  read(j, "chassis_mass_kg", r.chassis_mass_kg);
  read(j, "wheel_mass_kg", r.wheel_mass_kg);
  read(j, "torque_const_kt", r.torque_const_kt);
  read(j, "back_emf_ke", r.back_emf_ke);
  read(j, "armature_resistance_r", r.armature_resistance_r);
  read(j, "no_load_current_i0", r.no_load_current_i0);
  read(j, "damping_b", r.damping_b);
  read(j, "motor_efficiency_eta", r.motor_efficiency_eta);
  read(j, "rolling_resist_coeff", r.rolling_resist_coeff);
  read(j, "center_offset_d_m", r.center_offset_d_m);
  return r;
}

json robot_to(const RobotParams& r) {
  return {{"wheel_radius_m", r.wheel_radius_m},
          {"wheel_base_m", r.wheel_base_m},
          {"chassis_mass_kg", r.chassis_mass_kg},
          {"wheel_mass_kg", r.wheel_mass_kg},
          {"torque_const_kt", r.torque_const_kt},
          {"back_emf_ke", r.back_emf_ke},
          {"armature_resistance_r", r.armature_resistance_r},
          {"no_load_current_i0", r.no_load_current_i0},
          {"damping_b", r.damping_b},
          {"motor_efficiency_eta", r.motor_efficiency_eta},
          {"rolling_resist_coeff", r.rolling_resist_coeff},
          {"center_offset_d_m", r.center_offset_d_m}};
}

BatteryParams battery_from(const json& j, BatteryParams b) {
  reject_unknown(j, {"a", "n", "capacity_mah", "v_full", "charge_rate_ma"}, "battery");
  if (j.contains("a")) {
    const auto a = j.at("a").get<std::vector<double>>();
    if (a.size() != 6) {
      throw std::invalid_argument("battery.a needs six coefficients");
    }
    std::copy(a.begin(), a.end(), b.a.begin());
  }
  read(j, "n", b.n);
  read(j, "capacity_mah", b.capacity_mah);
  read(j, "v_full", b.v_full);
  read(j, "charge_rate_ma", b.charge_rate_ma);
  return b;
}

json battery_to(const BatteryParams& b) {
  return {{"a", std::vector<double>(b.a.begin(), b.a.end())},
          {"n", b.n},
          {"capacity_mah", b.capacity_mah},
          {"v_full", b.v_full},
          {"charge_rate_ma", b.charge_rate_ma}};
}

TrajectorySpec trajectory_from(const json& j) {
  reject_unknown(j, {"kind", "center", "radius_m", "start_angle_rad", "waypoints", "speed_mps"}, "trajectory");
  TrajectorySpec t;
  const std::string kind = j.value("kind", "circle");
  if (kind == "circle") {
    t.kind = TrajectorySpec::Kind::Circle;
  } else if (kind == "waypoints") {
    t.kind = TrajectorySpec::Kind::Waypoints;
  } else {
    throw std::invalid_argument("trajectory.kind must be circle or waypoints");
  }
  if (j.contains("center")) {
    t.center = point_from(j.at("center"));
  }
  read(j, "radius_m", t.radius_m);
  read(j, "start_angle_rad", t.start_angle_rad);
  read(j, "speed_mps", t.speed_mps);
  if (j.contains("waypoints")) {
    for (const auto& p : j.at("waypoints")) {
      t.waypoints.push_back(point_from(p));
    }
  }
  return t;
}

json trajectory_to(const TrajectorySpec& t) {
  json j = {{"kind", t.kind == TrajectorySpec::Kind::Circle ? "circle" : "waypoints"},
            {"center", point_to(t.center)},
            {"radius_m", t.radius_m},
            {"start_angle_rad", t.start_angle_rad},
            {"speed_mps", t.speed_mps}};
  if (!t.waypoints.empty()) {
    json w = json::array();
    for (const auto& p : t.waypoints) {
      w.push_back(point_to(p));
    }
    j["waypoints"] = w;
  }
  return j;
}

ControlGains gains_from(const json& j) {
  reject_unknown(j, {"k1", "k2", "k3", "k4", "k5", "k6", "v_max", "w_max", "printed_sign_variant"}, "gains");
  ControlGains g;
  read(j, "k1", g.k1);
  read(j, "k2", g.k2);
  read(j, "k3", g.k3);
  read(j, "k4", g.k4);
  read(j, "k5", g.k5);
  read(j, "k6", g.k6);
  read(j, "v_max", g.v_max);
  read(j, "w_max", g.w_max);
  read(j, "printed_sign_variant", g.printed_sign_variant);
  return g;
}

json gains_to(const ControlGains& g) {
  return {{"k1", g.k1}, {"k2", g.k2}, {"k3", g.k3},       {"k4", g.k4},       {"k5", g.k5},
          {"k6", g.k6}, {"v_max", g.v_max}, {"w_max", g.w_max}, {"printed_sign_variant", g.printed_sign_variant}};
}

PolicySpec policy_from(const json& j) {
  reject_unknown(j,
                 {"kind", "threshold_fraction", "min_entry_fraction", "horizon_k", "w1", "w2",
                  "threshold_voltage", "threshold_hold_s", "d_th_mah", "r_c_mah", "r_d_mah"},
                 "policy");
  PolicySpec p;
  const std::string kind = j.value("kind", "none");
  if (kind == "none") {
    p.kind = PolicyKind::None;
  } else if (kind == "baseline") {
    p.kind = PolicyKind::Baseline;
  } else if (kind == "optimized") {
    p.kind = PolicyKind::Optimized;
  } else {
    throw std::invalid_argument("policy.kind must be none, baseline or optimized");
  }
  read(j, "threshold_fraction", p.threshold_fraction);
  read(j, "min_entry_fraction", p.min_entry_fraction);
  read(j, "horizon_k", p.horizon_k);
  read(j, "w1", p.w1);
  read(j, "w2", p.w2);
  read(j, "threshold_voltage", p.threshold_voltage);
  read(j, "threshold_hold_s", p.threshold_hold_s);
  read_opt(j, "d_th_mah", p.d_th_mah);
  read_opt(j, "r_c_mah", p.r_c_mah);
  read_opt(j, "r_d_mah", p.r_d_mah);
  return p;
}

json policy_to(const PolicySpec& p) {
  const char* kind = p.kind == PolicyKind::None ? "none" : p.kind == PolicyKind::Baseline ? "baseline" : "optimized";
  json j = {{"kind", kind},
            {"threshold_fraction", p.threshold_fraction},
            {"min_entry_fraction", p.min_entry_fraction},
            {"horizon_k", p.horizon_k},
            {"w1", p.w1},
            {"w2", p.w2},
            {"threshold_voltage", p.threshold_voltage},
            {"threshold_hold_s", p.threshold_hold_s}};
  if (p.d_th_mah) j["d_th_mah"] = *p.d_th_mah;
  if (p.r_c_mah) j["r_c_mah"] = *p.r_c_mah;
  if (p.r_d_mah) j["r_d_mah"] = *p.r_d_mah;
  return j;
}

FormationSlot slot_from(const json& j) {
  reject_unknown(j, {"rho_d", "psi_rad", "psi_deg", "robot_id"}, "formation.slots");
  FormationSlot s;
  s.rho_d = j.at("rho_d").get<double>();
  if (j.contains("psi_rad")) {
    s.psi_d = j.at("psi_rad").get<double>();
  } else if (j.contains("psi_deg")) {
    s.psi_d = j.at("psi_deg").get<double>() * std::numbers::pi / 180.0;
  }
  read_opt(j, "robot_id", s.robot_id);
  return s;
}

json slot_to(const FormationSlot& s) {
  json j = {{"rho_d", s.rho_d}, {"psi_rad", s.psi_d}};
  if (s.robot_id) j["robot_id"] = *s.robot_id;
  return j;
}

WorldConfig config_from(const json& j) {
  reject_unknown(j,
                 {"dt_s", "max_sim_time_s", "seed", "payload_mass_kg", "replacement_time_s", "wait_recheck_s",
                  "record_interval_s", "idle_drain_while_halted", "robot_dimension_m", "trajectory", "robot",
                  "battery", "gains", "initial_charge", "formation", "hubs", "supports", "fleet", "policy"},
                 "config");
  WorldConfig c;
  read(j, "dt_s", c.dt_s);
  read(j, "max_sim_time_s", c.max_sim_time_s);
  read(j, "seed", c.seed);
  read(j, "payload_mass_kg", c.payload_mass_kg);
  read(j, "replacement_time_s", c.replacement_time_s);
  read(j, "wait_recheck_s", c.wait_recheck_s);
  read(j, "record_interval_s", c.record_interval_s);
  read(j, "idle_drain_while_halted", c.idle_drain_while_halted);
  read(j, "robot_dimension_m", c.robot_dimension_m);
  if (j.contains("trajectory")) c.trajectory = trajectory_from(j.at("trajectory"));
  if (j.contains("robot")) c.robot = robot_from(j.at("robot"), c.robot);
  if (j.contains("battery")) c.battery = battery_from(j.at("battery"), c.battery);
  if (j.contains("gains")) c.gains = gains_from(j.at("gains"));
  if (j.contains("initial_charge")) {
    const json& ic = j.at("initial_charge");
    reject_unknown(ic, {"min_fraction", "max_fraction"}, "initial_charge");
    read(ic, "min_fraction", c.initial_charge.min_fraction);
    read(ic, "max_fraction", c.initial_charge.max_fraction);
  }
  if (j.contains("formation")) {
    const json& f = j.at("formation");
    reject_unknown(f, {"leader", "slots"}, "formation");
    c.formation.leader = f.at("leader").get<int>();
    if (f.contains("slots")) {
      for (const auto& s : f.at("slots")) {
        c.formation.slots.push_back(slot_from(s));
      }
    }
  }
  if (j.contains("hubs")) {
    for (const auto& h : j.at("hubs")) {
      reject_unknown(h, {"id", "position", "trigger_radius_m", "residents"}, "hubs");
      HubSpec hub;
      hub.id = h.at("id").get<int>();
      hub.position = point_from(h.at("position"));
      read(h, "trigger_radius_m", hub.trigger_radius_m);
      read(h, "residents", hub.residents);
      c.hubs.push_back(hub);
    }
  }
  if (j.contains("supports")) {
    for (const auto& s : j.at("supports")) {
      reject_unknown(s, {"id", "park"}, "supports");
      c.supports.push_back({s.at("id").get<int>(), point_from(s.at("park"))});
    }
  }
  if (j.contains("fleet")) {
    for (const auto& e : j.at("fleet")) {
      FleetEntry entry;
      if (e.is_number_integer()) {
        entry.id = e.get<int>();
      } else {
        reject_unknown(e, {"id", "initial_discharge_mah", "robot", "battery"}, "fleet");
        entry.id = e.at("id").get<int>();
        read_opt(e, "initial_discharge_mah", entry.initial_discharge_mah);
        if (e.contains("robot")) entry.robot = robot_from(e.at("robot"), c.robot);
        if (e.contains("battery")) entry.battery = battery_from(e.at("battery"), c.battery);
      }
      c.fleet.push_back(entry);
    }
  }
  if (j.contains("policy")) c.policy = policy_from(j.at("policy"));
  return c;
}

json config_to(const WorldConfig& c) {
  json hubs = json::array();
  for (const auto& h : c.hubs) {
    hubs.push_back({{"id", h.id},
                    {"position", point_to(h.position)},
                    {"trigger_radius_m", h.trigger_radius_m},
                    {"residents", h.residents}});
  }
  json supports = json::array();
  for (const auto& s : c.supports) {
    supports.push_back({{"id", s.id}, {"park", point_to(s.park)}});
  }
  json fleet = json::array();
  for (const auto& e : c.fleet) {
    json entry = {{"id", e.id}};
    if (e.initial_discharge_mah) entry["initial_discharge_mah"] = *e.initial_discharge_mah;
    if (e.robot) entry["robot"] = robot_to(*e.robot);
    if (e.battery) entry["battery"] = battery_to(*e.battery);
    fleet.push_back(entry);
  }
  json slots = json::array();
  for (const auto& s : c.formation.slots) {
    slots.push_back(slot_to(s));
  }
  return {{"dt_s", c.dt_s},
          {"max_sim_time_s", c.max_sim_time_s},
          {"seed", c.seed},
          {"payload_mass_kg", c.payload_mass_kg},
          {"replacement_time_s", c.replacement_time_s},
          {"wait_recheck_s", c.wait_recheck_s},
          {"record_interval_s", c.record_interval_s},
          {"idle_drain_while_halted", c.idle_drain_while_halted},
          {"robot_dimension_m", c.robot_dimension_m},
          {"trajectory", trajectory_to(c.trajectory)},
          {"robot", robot_to(c.robot)},
          {"battery", battery_to(c.battery)},
          {"gains", gains_to(c.gains)},
          {"initial_charge",
           {{"min_fraction", c.initial_charge.min_fraction}, {"max_fraction", c.initial_charge.max_fraction}}},
          {"formation", {{"leader", c.formation.leader}, {"slots", slots}}},
          {"hubs", hubs},
          {"supports", supports},
          {"fleet", fleet},
          {"policy", policy_to(c.policy)}};
}

}  // namespace

void WorldConfig::validate() const {
  if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be positive");
  if (!(max_sim_time_s > 0.0)) throw std::invalid_argument("max_sim_time_s must be positive");
  if (payload_mass_kg < 0.0) throw std::invalid_argument("payload_mass_kg must be >= 0");
  if (!(replacement_time_s > 0.0)) throw std::invalid_argument("replacement_time_s must be positive");
  if (!(wait_recheck_s > 0.0)) throw std::invalid_argument("wait_recheck_s must be positive");
  if (record_interval_s < 0.0) throw std::invalid_argument("record_interval_s must be >= 0");
  if (robot_dimension_m < 0.0) throw std::invalid_argument("robot_dimension_m must be >= 0");
  if (policy.threshold_hold_s < 0.0) throw std::invalid_argument("policy.threshold_hold_s must be >= 0");
  if (!(initial_charge.min_fraction >= 0.0 && initial_charge.min_fraction <= initial_charge.max_fraction &&
        initial_charge.max_fraction <= 1.0)) {
    throw std::invalid_argument("initial_charge needs 0 <= min_fraction <= max_fraction <= 1");
  }
  trajectory.validate();
  robot.validate();
  battery.validate();
  gains.validate();
  if (fleet.empty()) throw std::invalid_argument("fleet is empty");

  std::set<int> ids;
  for (const auto& e : fleet) {
    if (!ids.insert(e.id).second) throw std::invalid_argument("duplicate robot id " + std::to_string(e.id));
    if (e.robot) e.robot->validate();
    if (e.battery) e.battery->validate();
    const BatteryParams b = e.battery.value_or(battery);
    if (e.initial_discharge_mah && !(*e.initial_discharge_mah >= 0.0 && *e.initial_discharge_mah <= b.capacity_mah)) {
      throw std::invalid_argument("initial discharge outside [0, capacity] for robot " + std::to_string(e.id));
    }
  }
  // every robot has exactly one starting place
  std::multiset<int> placed;
  placed.insert(formation.leader);
  for (const auto& s : formation.slots) {
    if (!s.robot_id) throw std::invalid_argument("every formation slot needs a robot at start");
    if (s.rho_d < min_separation()) throw std::invalid_argument("slot rho_d below minimum separation");
    placed.insert(*s.robot_id);
  }
  std::set<int> hub_ids;
  for (const auto& h : hubs) {
    if (!hub_ids.insert(h.id).second) throw std::invalid_argument("duplicate hub id");
    if (!(h.trigger_radius_m > 0.0)) throw std::invalid_argument("hub trigger radius must be positive");
    placed.insert(h.residents.begin(), h.residents.end());
  }
  for (const auto& s : supports) {
    placed.insert(s.id);
  }
  for (int id : ids) {
    if (placed.count(id) != 1) {
      throw std::invalid_argument("robot " + std::to_string(id) + " must appear exactly once in formation, hubs or supports");
    }
  }
  if (placed.size() != ids.size()) throw std::invalid_argument("formation, hubs or supports name an unknown robot");
  if (policy.kind != PolicyKind::None && hubs.empty()) throw std::invalid_argument("a replacement policy needs hubs");
  if (policy.kind != PolicyKind::None && supports.empty()) {
    throw std::invalid_argument("a replacement policy needs at least one support robot");
  }
  if (policy.kind == PolicyKind::Baseline && !(policy.threshold_fraction > 0.0 && policy.threshold_fraction < 1.0)) {
    throw std::invalid_argument("baseline threshold must lie in (0, 1)");
  }
  if (policy.kind == PolicyKind::Optimized && policy.horizon_k < 1) throw std::invalid_argument("horizon_k must be >= 1");
}

RobotParams WorldConfig::robot_params(int id) const {
  for (const auto& e : fleet) {
    if (e.id == id && e.robot) return *e.robot;
  }
  return robot;
}

BatteryParams WorldConfig::battery_params(int id) const {
  for (const auto& e : fleet) {
    if (e.id == id && e.battery) return *e.battery;
  }
  return battery;
}

WorldConfig parse_config(const std::string& text) {
  WorldConfig c;
  try {
    c = config_from(json::parse(text, nullptr, true, true));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

WorldConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string serialize_config(const WorldConfig& config) { return config_to(config).dump(2) + "\n"; }

PolicySpec named_policy(const std::string& name, const PolicySpec& base) {
  PolicySpec p = base;
  if (name == "none") {
    p.kind = PolicyKind::None;
  } else if (name == "baseline30") {
    p.kind = PolicyKind::Baseline;
    p.threshold_fraction = 0.30;
  } else if (name == "baseline40") {
    p.kind = PolicyKind::Baseline;
    p.threshold_fraction = 0.40;
  } else if (name == "optimized") {
    p.kind = PolicyKind::Optimized;
  } else {
    throw std::invalid_argument("unknown policy '" + name + "'");
  }
  return p;
}

std::string policy_name(const PolicySpec& policy) {
  switch (policy.kind) {
    case PolicyKind::None:
      return "none";
    case PolicyKind::Optimized:
      return "optimized";
    case PolicyKind::Baseline:
      break;
  }
  return "baseline" + std::to_string(static_cast<int>(std::lround(policy.threshold_fraction * 100.0)));
}

void apply_overrides(WorldConfig& config, const ConfigOverrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.payload_mass_kg) config.payload_mass_kg = *o.payload_mass_kg;
  if (o.policy) config.policy = named_policy(*o.policy, config.policy);
  if (o.horizon_k) config.policy.horizon_k = *o.horizon_k;
  config.validate();
}

std::string overrides_to_json(const ConfigOverrides& o) {
  json j = json::object();
  if (o.seed) j["seed"] = *o.seed;
  if (o.payload_mass_kg) j["payload_mass_kg"] = *o.payload_mass_kg;
  if (o.policy) j["policy"] = *o.policy;
  if (o.horizon_k) j["horizon_k"] = *o.horizon_k;
  return j.dump();
}

}  // namespace fleet
