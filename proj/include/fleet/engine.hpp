#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fleet/config.hpp"
#include "fleet/scheduler.hpp"

namespace fleet {

enum class Role { Leader, Follower, HubResident, InTransit, Support };

enum class Phase {
  Transporting,
  Scheduling,
  PistonsUp,
  SupportJoining,
  SupportUp,
  LeaverDown,
  LeaverExit,
  EntrantJoin,
  EntrantUp,
  SupportDown,
  SupportExit,
  PistonsDown,
  Waiting,
};

enum class Termination { Running, Depleted, Stalled, TimeLimit };

const char* role_name(Role role);
const char* phase_name(Phase phase);
const char* termination_name(Termination t);

inline constexpr int kLeaderSlot = -1;
inline constexpr int kNoSlot = -2;

struct RobotState {
  int id = 0;
  Role role = Role::HubResident;
  Pose pose;
  BodyVelocity vel;
  RobotParams params;
  BatteryParams battery_params;
  BatteryState battery;
  ControllerState ctrl;
  int slot = kNoSlot;            // kLeaderSlot, a follower slot index, or kNoSlot
  std::optional<int> hub_id;     // set while hub-resident
  bool piston_up = false;
  bool bearing = false;          // currently carrying part of the payload
};

struct TickRecord {
  double time_s = 0.0;
  int robot_id = 0;
  Role role = Role::HubResident;
  double voltage_v = 0.0;
  double discharge_mah = 0.0;
  double x_m = 0.0;
  double y_m = 0.0;
};

struct ReplacementEvent {
  double time_s = 0.0;  // start of the swap
  int hub_id = 0;
  int leaving = 0;
  int entering = 0;
  double leaving_remaining_fraction = 0.0;
  double entering_remaining_fraction = 0.0;
  double duration_s = 0.0;
};

/// Remaining charge of every scheduled robot at the first decision of each
/// hub visit.
struct HubVisit {
  double time_s = 0.0;
  int hub_id = 0;
  std::vector<double> remaining_fraction;  // ordered as RunMetrics::profile_robot_ids
};

struct RunSummary {
  double operational_time_s = 0.0;
  double sim_time_s = 0.0;
  double distance_m = 0.0;
  double waiting_time_s = 0.0;
  int replacement_count = 0;
  int hub_visits = 0;
  Termination termination = Termination::Running;
  std::optional<double> first_threshold_crossing_s;  // start of the first sustained dip below the threshold voltage
};

/// Safety bookkeeping checked every tick.
struct RunAudit {
  int min_supporters = 0;
  int max_supporters = 0;
  long conservation_violations = 0;
  long separation_violations = 0;
  long transport_ticks = 0;
  int max_concurrent_orders = 0;
  std::vector<double> swap_durations_s;
};

struct DerivedConstants {
  double leg_time_s = 0.0;
  double nominal_power_w = 0.0;
  double r_d_mah = 0.0;
  double r_c_mah = 0.0;
  double d_th_mah = 0.0;
};

struct RunMetrics {
  std::vector<TickRecord> ticks;
  std::vector<ReplacementEvent> replacements;
  std::vector<HubVisit> hub_visits;
  std::vector<int> profile_robot_ids;
  RunSummary summary;
  RunAudit audit;
  DerivedConstants derived;
};

struct PolicyOutcome {
  ReplacementOrder order;
  bool wait = false;
};

/// r_c, r_d, d_th and the nominal leg figures for a config.
DerivedConstants derive_constants(const WorldConfig& config);

class World {
 public:
  explicit World(WorldConfig config);

  void tick();
  RunMetrics run();

  /// Edge-triggered: fires once per entry of the leader into a hub circle.
  std::optional<int> hub_arrival_check();
  PolicyOutcome run_policy_at_hub(int hub_id) const;
  /// Starts the swap cycle for a non-empty order. Empty orders are ignored.
  void execute_replacement(const ReplacementOrder& order);
  ScheduleProblem build_problem(int hub_id, int horizon_k) const;

  Phase phase() const { return phase_; }
  double time() const { return static_cast<double>(tick_index_) * cfg_.dt_s; }
  long tick_index() const { return tick_index_; }
  bool terminated() const { return metrics_.summary.termination != Termination::Running; }
  const std::vector<RobotState>& robots() const { return robots_; }
  const RobotState& robot(int id) const;
  int leader_id() const;
  int supporters() const;
  const RunMetrics& metrics() const { return metrics_; }
  const WorldConfig& config() const { return cfg_; }
  const std::vector<int>& hub_residents(int hub_id) const;
  bool conservation_ok() const;

  /// Moves the leader reference without simulating (tests).
  void place_leader_at_arc(double s);

 private:
  struct Swap {
    int hub_id = 0;
    int leaver = 0;
    int entrant = 0;
    int support = 0;
    int slot = kNoSlot;
    Point2 leaver_from, hub_point, support_point, support_park;
    Pose slot_pose;
    long start_tick = 0;
    double leaver_fraction = 0.0;
    double entrant_fraction = 0.0;
  };

  RobotState& mut(int id);
  std::size_t index_of(int id) const;
  std::size_t hub_index(int hub_id) const;
  void transport_step();
  void halted_step();
  void swap_step();
  void scheduling_step();
  void drain(RobotState& r, const BodyVelocity& cmd, double power_w);
  void idle(RobotState& r);
  void begin_swap();
  void enter_phase(Phase p);
  Pose seat_pose(int slot) const;
  void record();
  void audit();
  void finish(Termination t);
  std::vector<int> hub_order_from(int hub_id) const;

  WorldConfig cfg_;
  DerivedConstants derived_;
  std::vector<RobotState> robots_;
  std::vector<std::vector<int>> residents_;  // per cfg_.hubs index
  std::vector<bool> armed_;
  std::vector<double> hub_arc_;
  std::vector<int> slot_robot_;              // follower slot -> robot id (0 when vacant)
  int leader_ = 0;
  double arc_s_ = 0.0;
  Phase phase_ = Phase::Transporting;
  long tick_index_ = 0;
  long record_every_ = 0;

  // scheduling / swap state
  std::optional<int> current_hub_;
  bool visit_recorded_ = false;
  bool rerun_after_swaps_ = false;
  std::vector<std::pair<int, int>> pending_pairs_;
  std::optional<Swap> swap_;
  long swap_tick_ = 0;
  long swap_total_ticks_ = 0;
  std::vector<long> phase_end_;  // cumulative tick boundaries of the ten swap phases
  long wait_ticks_ = 0;
  std::optional<long> below_since_;  // first tick of the current run below threshold

  RunMetrics metrics_;
};

RunMetrics run(const WorldConfig& config);

}  // namespace fleet
