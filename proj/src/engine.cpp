#include "fleet/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "fleet/battery.hpp"
#include "fleet/trajectory.hpp"

namespace fleet {

namespace {

// relative durations of PistonsUp .. PistonsDown
constexpr std::array<int, 10> kPhaseWeights{1, 3, 1, 1, 3, 3, 1, 1, 3, 1};
constexpr std::array<Phase, 10> kSwapPhases{Phase::PistonsUp,   Phase::SupportJoining, Phase::SupportUp,
                                            Phase::LeaverDown,  Phase::LeaverExit,     Phase::EntrantJoin,
                                            Phase::EntrantUp,   Phase::SupportDown,    Phase::SupportExit,
                                            Phase::PistonsDown};

Point2 lerp(const Point2& a, const Point2& b, double u) { return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)}; }

bool in_formation(Role r) { return r == Role::Leader || r == Role::Follower; }

}  // namespace

const char* role_name(Role role) {
  switch (role) {
    case Role::Leader:
      return "leader";
    case Role::Follower:
      return "follower";
    case Role::HubResident:
      return "hub";
    case Role::InTransit:
      return "in_transit";
    case Role::Support:
      return "support";
  }
  return "?";
}

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::Transporting: return "transporting";
    case Phase::Scheduling: return "scheduling";
    case Phase::PistonsUp: return "pistons_up";
    case Phase::SupportJoining: return "support_joining";
    case Phase::SupportUp: return "support_up";
    case Phase::LeaverDown: return "leaver_down";
    case Phase::LeaverExit: return "leaver_exit";
    case Phase::EntrantJoin: return "entrant_join";
    case Phase::EntrantUp: return "entrant_up";
    case Phase::SupportDown: return "support_down";
    case Phase::SupportExit: return "support_exit";
    case Phase::PistonsDown: return "pistons_down";
    case Phase::Waiting: return "waiting";
  }
  return "?";
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Running: return "running";
    case Termination::Depleted: return "depleted";
    case Termination::Stalled: return "stalled";
    case Termination::TimeLimit: return "time_limit";
  }
  return "?";
}

DerivedConstants derive_constants(const WorldConfig& config) {
  DerivedConstants d;
  const TrajectorySpec& traj = config.trajectory;
  RobotParams p = config.robot;
  p.payload_share_kg = config.payload_mass_kg / config.formation.size();
  const double w = traj.kind == TrajectorySpec::Kind::Circle ? traj.speed_mps / traj.radius_m : 0.0;
  d.nominal_power_w = drive_power({traj.speed_mps, w}, {}, p);
  const double hubs = static_cast<double>(std::max<std::size_t>(1, config.hubs.size()));
  d.leg_time_s = traj.length() / (hubs * traj.speed_mps);

  const BatteryParams& b = config.battery;
  BatteryState s = battery_state_at(b, 0.5 * b.capacity_mah);
  for (double t = 0.0; t < d.leg_time_s;) {
    const double step = std::min(1.0, d.leg_time_s - t);
    s = discharge_step(b, s, d.nominal_power_w, step).state;
    t += step;
  }
  d.r_d_mah = s.discharge_mah - 0.5 * b.capacity_mah;
  d.r_c_mah = -b.charge_rate_ma * d.leg_time_s / 3600.0;
  d.d_th_mah = discharge_at_loaded_voltage(b, config.policy.threshold_voltage, d.nominal_power_w);

  if (config.policy.r_d_mah) d.r_d_mah = *config.policy.r_d_mah;
  if (config.policy.r_c_mah) d.r_c_mah = *config.policy.r_c_mah;
  if (config.policy.d_th_mah) d.d_th_mah = *config.policy.d_th_mah;
  return d;
}

World::World(WorldConfig config) : cfg_(std::move(config)) {
  cfg_.validate();
  derived_ = derive_constants(cfg_);
  metrics_.derived = derived_;

  const int f = cfg_.formation.size();
  const double share = cfg_.payload_mass_kg / f;
  std::mt19937_64 rng(cfg_.seed);
  std::uniform_real_distribution<double> frac(cfg_.initial_charge.min_fraction, cfg_.initial_charge.max_fraction);

  for (const FleetEntry& e : cfg_.fleet) {
    RobotState r;
    r.id = e.id;
    r.params = cfg_.robot_params(e.id);
    r.battery_params = cfg_.battery_params(e.id);
    const double drawn = frac(rng);  // drawn for every robot so the stream does not depend on overrides
    const double d0 = e.initial_discharge_mah.value_or((1.0 - drawn) * r.battery_params.capacity_mah);
    r.battery = battery_state_at(r.battery_params, d0);
    robots_.push_back(r);
  }

  leader_ = cfg_.formation.leader;
  const LeaderCommand ref = leader_at_arc(cfg_.trajectory, 0.0);
  {
    RobotState& l = mut(leader_);
    l.role = Role::Leader;
    l.slot = kLeaderSlot;
    l.pose = ref.pose;
  }
  slot_robot_.assign(cfg_.formation.slots.size(), 0);
  for (std::size_t i = 0; i < cfg_.formation.slots.size(); ++i) {
    const int id = *cfg_.formation.slots[i].robot_id;
    RobotState& r = mut(id);
    r.role = Role::Follower;
    r.slot = static_cast<int>(i);
    r.pose = seat_pose(r.slot);
    slot_robot_[i] = id;
  }
  for (RobotState& r : robots_) {
    if (in_formation(r.role)) {
      r.piston_up = true;
      r.bearing = true;
      r.params.payload_share_kg = share;
    }
  }
  residents_.resize(cfg_.hubs.size());
  for (std::size_t h = 0; h < cfg_.hubs.size(); ++h) {
    for (int id : cfg_.hubs[h].residents) {
      RobotState& r = mut(id);
      r.role = Role::HubResident;
      r.hub_id = cfg_.hubs[h].id;
      r.pose = {cfg_.hubs[h].position.x, cfg_.hubs[h].position.y, 0.0, 0.0, 0.0};
      residents_[h].push_back(id);
    }
    hub_arc_.push_back(arc_position(cfg_.trajectory, cfg_.hubs[h].position));
  }
  for (const SupportSpec& s : cfg_.supports) {
    RobotState& r = mut(s.id);
    r.role = Role::Support;
    r.pose = {s.park.x, s.park.y, 0.0, 0.0, 0.0};
  }
  armed_.assign(cfg_.hubs.size(), true);

  record_every_ = cfg_.record_interval_s > 0.0
                      ? std::max<long>(1, std::lround(cfg_.record_interval_s / cfg_.dt_s))
                      : 0;
  swap_total_ticks_ = std::max<long>(1, std::lround(cfg_.replacement_time_s / cfg_.dt_s));
  const int weight_sum = 18;
  int cum = 0;
  for (int w : kPhaseWeights) {
    cum += w;
    phase_end_.push_back(std::lround(static_cast<double>(swap_total_ticks_) * cum / weight_sum));
  }
  for (const RobotState& r : robots_) {
    if (r.role != Role::Support) metrics_.profile_robot_ids.push_back(r.id);
  }
  metrics_.audit.min_supporters = supporters();
  metrics_.audit.max_supporters = supporters();
  record();
}

std::size_t World::index_of(int id) const {
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    if (robots_[i].id == id) return i;
  }
  throw std::out_of_range("unknown robot id " + std::to_string(id));
}

RobotState& World::mut(int id) { return robots_[index_of(id)]; }
const RobotState& World::robot(int id) const { return robots_[index_of(id)]; }

std::size_t World::hub_index(int hub_id) const {
  for (std::size_t h = 0; h < cfg_.hubs.size(); ++h) {
    if (cfg_.hubs[h].id == hub_id) return h;
  }
  throw std::out_of_range("unknown hub id " + std::to_string(hub_id));
}

const std::vector<int>& World::hub_residents(int hub_id) const { return residents_[hub_index(hub_id)]; }

int World::leader_id() const { return leader_; }

int World::supporters() const {
  return static_cast<int>(std::count_if(robots_.begin(), robots_.end(), [](const RobotState& r) { return r.bearing; }));
}

Pose World::seat_pose(int slot) const {
  const Pose lp = leader_at_arc(cfg_.trajectory, arc_s_).pose;
  if (slot == kLeaderSlot) return lp;
  const Pose target = slot_world_target(lp, cfg_.formation.slots[static_cast<std::size_t>(slot)]);
  const double d = cfg_.robot.center_offset_d_m;
  return {target.x - d * std::cos(lp.theta), target.y - d * std::sin(lp.theta), lp.theta, 0.0, 0.0};
}

void World::place_leader_at_arc(double s) {
  arc_s_ = s;
  if (leader_ != 0) mut(leader_).pose = leader_at_arc(cfg_.trajectory, s).pose;
}

void World::drain(RobotState& r, const BodyVelocity& cmd, double power_w) {
  r.vel = cmd;
  const DischargeResult res = discharge_step(r.battery_params, r.battery, power_w, cfg_.dt_s);
  r.battery = res.state;
  if (res.depleted && in_formation(r.role)) finish(Termination::Depleted);
}

void World::idle(RobotState& r) {
  switch (r.role) {
    case Role::HubResident:
      r.vel = {};
      r.battery = charge_step(r.battery_params, r.battery, cfg_.dt_s);
      break;
    case Role::InTransit:
      break;  // moved and drained by swap_step
    default:
      if (cfg_.idle_drain_while_halted) {
        drain(r, {}, drive_power({}, {}, r.params));
      } else {
        r.vel = {};
      }
  }
}

void World::transport_step() {
  const LeaderCommand now = leader_at_arc(cfg_.trajectory, arc_s_);
  const Pose lp = now.pose;
  const BodyVelocity lv = now.vel;
  const double dt = cfg_.dt_s;

  for (RobotState& r : robots_) {
    if (r.role == Role::Follower) {
      ControlGains g = cfg_.gains;
      g.center_offset_d_m = r.params.center_offset_d_m;
      const FollowerOutput out =
          follower_command(lp, lv, r.pose, cfg_.formation.slots[static_cast<std::size_t>(r.slot)], g, r.ctrl, dt);
      const BodyAccel acc{(out.cmd.v - r.vel.v) / dt, (out.cmd.w - r.vel.w) / dt};
      const double power = drive_power(out.cmd, acc, r.params);
      r.ctrl = out.state;
      r.pose = integrate_kinematics(r.pose, out.cmd, r.params, dt);
      drain(r, out.cmd, power);
    } else if (r.role == Role::Leader) {
      const BodyAccel acc{(lv.v - r.vel.v) / dt, (lv.w - r.vel.w) / dt};
      const double power = drive_power(lv, acc, r.params);
      const Pose wheels = integrate_kinematics(r.pose, lv, r.params, dt);
      r.pose = leader_at_arc(cfg_.trajectory, arc_s_ + lv.v * dt).pose;
      r.pose.phi_r = wheels.phi_r;
      r.pose.phi_l = wheels.phi_l;
      drain(r, lv, power);
    } else {
      idle(r);
    }
  }
  arc_s_ += lv.v * dt;
  metrics_.summary.operational_time_s += dt;
  metrics_.summary.distance_m += lv.v * dt;

  if (!metrics_.summary.first_threshold_crossing_s) {
    // acceleration transients after a halt dip the loaded voltage briefly
    const bool below = std::any_of(robots_.begin(), robots_.end(), [&](const RobotState& r) {
      return in_formation(r.role) && r.battery.voltage <= cfg_.policy.threshold_voltage;
    });
    if (!below) {
      below_since_.reset();
    } else {
      if (!below_since_) below_since_ = tick_index_;
      if (static_cast<double>(tick_index_ - *below_since_ + 1) * dt >= cfg_.policy.threshold_hold_s - 1e-9) {
        metrics_.summary.first_threshold_crossing_s = static_cast<double>(*below_since_ + 1) * dt;
      }
    }
  }
  if (terminated() || cfg_.policy.kind == PolicyKind::None) return;

  if (const auto hub = hub_arrival_check()) {
    for (RobotState& r : robots_) {
      if (in_formation(r.role)) r.vel = {};
    }
    current_hub_ = *hub;
    visit_recorded_ = false;
    phase_ = Phase::Scheduling;
  }
}

std::optional<int> World::hub_arrival_check() {
  const Pose lp = leader_at_arc(cfg_.trajectory, arc_s_).pose;
  std::optional<int> fired;
  for (std::size_t h = 0; h < cfg_.hubs.size(); ++h) {
    const HubSpec& hub = cfg_.hubs[h];
    const bool inside = std::hypot(lp.x - hub.position.x, lp.y - hub.position.y) <= hub.trigger_radius_m;
    if (!inside) {
      armed_[h] = true;
    } else if (armed_[h] && !fired) {
      armed_[h] = false;
      fired = hub.id;
    }
  }
  return fired;
}

std::vector<int> World::hub_order_from(int hub_id) const {
  const std::size_t cur = hub_index(hub_id);
  const double len = cfg_.trajectory.length();
  std::vector<std::size_t> idx(cfg_.hubs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto ahead = [&](std::size_t h) {
    double a = std::fmod(hub_arc_[h] - hub_arc_[cur], len);
    return a < 0.0 ? a + len : a;
  };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (a == cur || b == cur) return a == cur && b != cur;
    return ahead(a) < ahead(b);
  });
  std::vector<int> ids;
  for (std::size_t i : idx) ids.push_back(cfg_.hubs[i].id);
  return ids;
}

ScheduleProblem World::build_problem(int hub_id, int horizon_k) const {
  ScheduleProblem p;
  p.horizon_k = horizon_k;
  p.formation_size_f = cfg_.formation.size();
  p.capacity_mah = cfg_.battery.capacity_mah;
  p.r_c = derived_.r_c_mah;
  p.r_d = derived_.r_d_mah;
  p.d_th = derived_.d_th_mah;
  p.w1 = cfg_.policy.w1;
  p.w2 = cfg_.policy.w2;
  for (const RobotState& r : robots_) {
    if (r.role == Role::Support) continue;
    p.robot_ids.push_back(r.id);
    p.d0.push_back(std::clamp(r.battery.discharge_mah, 0.0, p.capacity_mah));
    p.x0.push_back(in_formation(r.role) ? 1 : 0);
  }
  p.n_robots = static_cast<int>(p.robot_ids.size());
  const std::vector<int> order = hub_order_from(hub_id);
  for (int j = 0; j < horizon_k; ++j) {
    const int hub = order[static_cast<std::size_t>(j) % order.size()];
    const std::vector<int>& res = hub_residents(hub);
    Assignment h(p.robot_ids.size(), 0);
    for (std::size_t i = 0; i < p.robot_ids.size(); ++i) {
      if (std::find(res.begin(), res.end(), p.robot_ids[i]) != res.end()) h[i] = 1;
    }
    p.hub_presence.push_back(h);
  }
  return p;
}

PolicyOutcome World::run_policy_at_hub(int hub_id) const {
  PolicyOutcome out;
  out.order.hub_id = hub_id;
  switch (cfg_.policy.kind) {
    case PolicyKind::None:
      return out;
    case PolicyKind::Baseline: {
      const ScheduleProblem p = build_problem(hub_id, 1);
      const BaselineDecision d =
          baseline_policy(p, cfg_.policy.threshold_fraction, hub_id, cfg_.policy.min_entry_fraction);
      out.order = d.order;
      out.wait = d.wait;
      return out;
    }
    case PolicyKind::Optimized: {
      const ScheduleProblem p = build_problem(hub_id, cfg_.policy.horizon_k);
      const auto sol = solve(p);
      if (!sol) {
        out.wait = true;
        return out;
      }
      out.order = diff_solutions(p.x0, sol->x.front(), hub_id, p.robot_ids);
      return out;
    }
  }
  return out;
}

void World::execute_replacement(const ReplacementOrder& order) {
  if (order.empty()) return;
  if (order.leaving.size() != order.entering.size()) {
    throw std::invalid_argument("replacement order must pair leavers with entrants");
  }
  if (swap_) throw std::logic_error("a replacement is already in progress");
  current_hub_ = order.hub_id;
  pending_pairs_.clear();
  for (std::size_t i = 0; i < order.leaving.size(); ++i) {
    pending_pairs_.emplace_back(order.leaving[i], order.entering[i]);
  }
  for (RobotState& r : robots_) {
    if (in_formation(r.role)) r.vel = {};
  }
  begin_swap();
}

void World::begin_swap() {
  const auto [leaver_id, entrant_id] = pending_pairs_.front();
  pending_pairs_.erase(pending_pairs_.begin());
  const std::size_t h = hub_index(*current_hub_);
  const HubSpec& hub = cfg_.hubs[h];

  const RobotState& leaver = robot(leaver_id);
  const RobotState& entrant = robot(entrant_id);
  if (!in_formation(leaver.role)) throw std::logic_error("leaving robot is not in formation");
  if (entrant.role != Role::HubResident || entrant.hub_id != hub.id) {
    throw std::logic_error("entering robot is not at this hub");
  }

  Swap s;
  s.hub_id = hub.id;
  s.leaver = leaver_id;
  s.entrant = entrant_id;
  s.slot = leaver.slot;
  s.leaver_from = {leaver.pose.x, leaver.pose.y};
  s.hub_point = hub.position;
  s.slot_pose = seat_pose(s.slot);
  // nearest support robot to the hub
  double best = std::numeric_limits<double>::infinity();
  for (const SupportSpec& sp : cfg_.supports) {
    const double dist = std::hypot(sp.park.x - hub.position.x, sp.park.y - hub.position.y);
    if (dist < best) {
      best = dist;
      s.support = sp.id;
      s.support_park = sp.park;
    }
  }
  // support props the payload just outside the vacated seat
  const Pose lp = leader_at_arc(cfg_.trajectory, arc_s_).pose;
  double ux = s.slot_pose.x - lp.x;
  double uy = s.slot_pose.y - lp.y;
  const double un = std::hypot(ux, uy);
  if (un < 1e-9) {
    ux = -std::sin(lp.theta);
    uy = std::cos(lp.theta);
  } else {
    ux /= un;
    uy /= un;
  }
  s.support_point = {s.slot_pose.x + 0.3 * ux, s.slot_pose.y + 0.3 * uy};
  s.start_tick = tick_index_;
  s.leaver_fraction = remaining_fraction(leaver.battery_params, leaver.battery);
  s.entrant_fraction = remaining_fraction(entrant.battery_params, entrant.battery);
  swap_ = s;
  swap_tick_ = 0;
  metrics_.audit.max_concurrent_orders = std::max(metrics_.audit.max_concurrent_orders, 1);
  enter_phase(Phase::PistonsUp);
}

void World::enter_phase(Phase p) {
  phase_ = p;
  Swap& s = *swap_;
  const double share = cfg_.payload_mass_kg / cfg_.formation.size();
  switch (p) {
    case Phase::SupportUp: {
      RobotState& sup = mut(s.support);
      sup.piston_up = true;
      sup.bearing = true;
      break;
    }
    case Phase::LeaverDown: {
      RobotState& l = mut(s.leaver);
      l.piston_up = false;
      l.bearing = false;
      l.params.payload_share_kg = 0.0;
      break;
    }
    case Phase::LeaverExit: {
      RobotState& l = mut(s.leaver);
      if (l.role == Role::Leader) {
        leader_ = 0;
      } else {
        slot_robot_[static_cast<std::size_t>(l.slot)] = 0;
      }
      l.role = Role::InTransit;
      l.slot = kNoSlot;
      l.ctrl = {};
      break;
    }
    case Phase::EntrantJoin: {
      RobotState& l = mut(s.leaver);
      l.role = Role::HubResident;
      l.hub_id = s.hub_id;
      l.pose.x = s.hub_point.x;
      l.pose.y = s.hub_point.y;
      l.vel = {};
      residents_[hub_index(s.hub_id)].push_back(l.id);
      RobotState& e = mut(s.entrant);
      auto& res = residents_[hub_index(s.hub_id)];
      res.erase(std::remove(res.begin(), res.end(), e.id), res.end());
      e.role = Role::InTransit;
      e.hub_id.reset();
      break;
    }
    case Phase::EntrantUp: {
      RobotState& e = mut(s.entrant);
      e.pose = s.slot_pose;
      e.vel = {};
      e.ctrl = {};
      e.slot = s.slot;
      if (s.slot == kLeaderSlot) {
        e.role = Role::Leader;
        leader_ = e.id;
      } else {
        e.role = Role::Follower;
        slot_robot_[static_cast<std::size_t>(s.slot)] = e.id;
      }
      e.piston_up = true;
      e.bearing = true;
      e.params.payload_share_kg = share;
      break;
    }
    case Phase::SupportDown: {
      RobotState& sup = mut(s.support);
      sup.piston_up = false;
      sup.bearing = false;
      break;
    }
    case Phase::SupportExit:
    case Phase::PistonsUp:
    case Phase::SupportJoining:
    case Phase::PistonsDown:
    default:
      break;
  }
}

void World::halted_step() {
  std::array<int, 2> movers{0, 0};
  if (swap_) {
    if (phase_ == Phase::SupportJoining || phase_ == Phase::SupportExit) movers[0] = swap_->support;
  }
  for (RobotState& r : robots_) {
    if (r.id == movers[0]) continue;
    if (in_formation(r.role)) r.vel = {};
    idle(r);
  }
}

void World::swap_step() {
  Swap& s = *swap_;
  const std::size_t pi = static_cast<std::size_t>(
      std::find(kSwapPhases.begin(), kSwapPhases.end(), phase_) - kSwapPhases.begin());
  const long start = pi == 0 ? 0 : phase_end_[pi - 1];
  const long len = std::max<long>(1, phase_end_[pi] - start);
  const double u = static_cast<double>(swap_tick_ + 1 - start) / static_cast<double>(len);
  const double phase_time = static_cast<double>(len) * cfg_.dt_s;

  auto move = [&](int id, const Point2& from, const Point2& to) {
    RobotState& r = mut(id);
    const Point2 p = lerp(from, to, std::min(u, 1.0));
    const double dist = std::hypot(to.x - from.x, to.y - from.y);
    if (dist > 1e-12) r.pose.theta = std::atan2(to.y - from.y, to.x - from.x);
    r.pose.x = p.x;
    r.pose.y = p.y;
    const BodyVelocity v{dist / phase_time, 0.0};
    drain(r, v, drive_power(v, {}, r.params));
  };

  switch (phase_) {
    case Phase::SupportJoining:
      move(s.support, s.support_park, s.support_point);
      break;
    case Phase::SupportExit:
      move(s.support, s.support_point, s.support_park);
      break;
    case Phase::LeaverExit:
      move(s.leaver, s.leaver_from, s.hub_point);
      break;
    case Phase::EntrantJoin:
      move(s.entrant, s.hub_point, {s.slot_pose.x, s.slot_pose.y});
      break;
    default:
      break;
  }

  ++swap_tick_;
  if (swap_tick_ >= swap_total_ticks_) {
    ReplacementEvent ev;
    ev.time_s = static_cast<double>(s.start_tick) * cfg_.dt_s;
    ev.hub_id = s.hub_id;
    ev.leaving = s.leaver;
    ev.entering = s.entrant;
    ev.leaving_remaining_fraction = s.leaver_fraction;
    ev.entering_remaining_fraction = s.entrant_fraction;
    ev.duration_s = static_cast<double>(tick_index_ + 1 - s.start_tick) * cfg_.dt_s;
    metrics_.replacements.push_back(ev);
    metrics_.audit.swap_durations_s.push_back(ev.duration_s);
    metrics_.summary.replacement_count = static_cast<int>(metrics_.replacements.size());
    swap_.reset();
    if (!pending_pairs_.empty()) {
      begin_swap();
    } else if (rerun_after_swaps_) {
      rerun_after_swaps_ = false;
      phase_ = Phase::Scheduling;
    } else {
      phase_ = Phase::Transporting;
      current_hub_.reset();
    }
    return;
  }
  for (std::size_t q = pi; q + 1 < kSwapPhases.size() && swap_tick_ >= phase_end_[q]; ++q) {
    enter_phase(kSwapPhases[q + 1]);
  }
}

void World::scheduling_step() {
  const int hub = *current_hub_;
  if (!visit_recorded_) {
    visit_recorded_ = true;
    ++metrics_.summary.hub_visits;
    HubVisit v;
    v.time_s = time();
    v.hub_id = hub;
    for (int id : metrics_.profile_robot_ids) {
      const RobotState& r = robot(id);
      v.remaining_fraction.push_back(remaining_fraction(r.battery_params, r.battery));
    }
    metrics_.hub_visits.push_back(std::move(v));
  }
  const PolicyOutcome out = run_policy_at_hub(hub);
  if (!out.order.empty()) {
    pending_pairs_.clear();
    for (std::size_t i = 0; i < out.order.leaving.size(); ++i) {
      pending_pairs_.emplace_back(out.order.leaving[i], out.order.entering[i]);
    }
    rerun_after_swaps_ = out.wait;
    begin_swap();
    return;
  }
  if (out.wait) {
    const bool charging = std::any_of(robots_.begin(), robots_.end(), [](const RobotState& r) {
      return r.role == Role::HubResident && r.battery.discharge_mah > 0.0 && r.battery_params.charge_rate_ma > 0.0;
    });
    if (!charging) {
      finish(Termination::Stalled);
      return;
    }
    phase_ = Phase::Waiting;
    wait_ticks_ = 0;
    return;
  }
  phase_ = Phase::Transporting;
  current_hub_.reset();
}

void World::tick() {
  if (terminated()) return;
  switch (phase_) {
    case Phase::Transporting:
      transport_step();
      break;
    case Phase::Scheduling:
      halted_step();
      if (!terminated()) scheduling_step();
      break;
    case Phase::Waiting:
      halted_step();
      metrics_.summary.waiting_time_s += cfg_.dt_s;
      if (++wait_ticks_ >= std::max<long>(1, std::lround(cfg_.wait_recheck_s / cfg_.dt_s))) {
        phase_ = Phase::Scheduling;
      }
      break;
    default:
      halted_step();
      if (!terminated()) swap_step();
      break;
  }
  ++tick_index_;
  audit();
  record();
  if (!terminated() && time() >= cfg_.max_sim_time_s - 1e-9) finish(Termination::TimeLimit);
}

bool World::conservation_ok() const {
  int leaders = 0;
  for (const RobotState& r : robots_) {
    int places = 0;
    for (std::size_t h = 0; h < residents_.size(); ++h) {
      places += static_cast<int>(std::count(residents_[h].begin(), residents_[h].end(), r.id));
    }
    const bool listed_slot = r.slot >= 0 && static_cast<std::size_t>(r.slot) < slot_robot_.size() &&
                             slot_robot_[static_cast<std::size_t>(r.slot)] == r.id;
    const bool is_support =
        std::any_of(cfg_.supports.begin(), cfg_.supports.end(), [&](const SupportSpec& s) { return s.id == r.id; });
    switch (r.role) {
      case Role::Leader:
        ++leaders;
        if (leader_ != r.id || places != 0 || is_support) return false;
        break;
      case Role::Follower:
        if (!listed_slot || places != 0 || is_support) return false;
        break;
      case Role::HubResident:
        if (places != 1 || !r.hub_id || is_support) return false;
        break;
      case Role::InTransit:
        if (!swap_ || (r.id != swap_->leaver && r.id != swap_->entrant) || places != 0) return false;
        break;
      case Role::Support:
        if (!is_support || places != 0) return false;
        break;
    }
  }
  return leaders == (leader_ == 0 ? 0 : 1);
}

void World::audit() {
  RunAudit& a = metrics_.audit;
  const int s = supporters();
  a.min_supporters = std::min(a.min_supporters, s);
  a.max_supporters = std::max(a.max_supporters, s);
  if (!conservation_ok()) ++a.conservation_violations;
  if (phase_ == Phase::Transporting) {
    std::vector<Pose> poses;
    for (const RobotState& r : robots_) {
      if (in_formation(r.role)) poses.push_back(r.pose);
    }
    ++a.transport_ticks;
    if (!min_separation_ok(poses, cfg_.min_separation())) ++a.separation_violations;
  }
}

void World::record() {
  if (record_every_ == 0 || tick_index_ % record_every_ != 0) return;
  const double t = time();
  for (const RobotState& r : robots_) {
    metrics_.ticks.push_back({t, r.id, r.role, r.battery.voltage, r.battery.discharge_mah, r.pose.x, r.pose.y});
  }
}

void World::finish(Termination t) {
  if (!terminated()) metrics_.summary.termination = t;
}

RunMetrics World::run() {
  while (!terminated()) tick();
  metrics_.summary.sim_time_s = time();
  return metrics_;
}

RunMetrics run(const WorldConfig& config) { return World(config).run(); }

}  // namespace fleet
