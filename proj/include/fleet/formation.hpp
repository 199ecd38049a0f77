#pragma once

#include <optional>
#include <vector>

#include "fleet/drivetrain.hpp"

namespace fleet {

inline constexpr double kLocalizationDelta = 0.05;

struct FormationSlot {
  double rho_d = 0.0;
  double psi_d = 0.0;  // radians
  std::optional<int> robot_id;

  bool operator==(const FormationSlot&) const = default;
};

struct ControlGains {
  double k1 = 1.5;
  double k2 = 1.0;
  double k3 = 0.025;
  double k4 = 15.0;
  double k5 = 1.0;
  double k6 = 1.0;
  double center_offset_d_m = 0.05;
  double v_max = 0.3;
  double w_max = 1.0;
  // Use sin(psi - theta_ij) in the feed-forward of v_j instead of
  // sin(psi + theta_ij). Kept for experimentation; the rear slot diverges.
  bool printed_sign_variant = false;

  void validate() const;
  bool operator==(const ControlGains&) const = default;
};

struct ControllerState {
  double alpha = 0.0;
  double beta = 0.0;

  bool operator==(const ControllerState&) const = default;
};

struct TrackingError {
  double x_e = 0.0;  // leader-frame longitudinal, target minus control point
  double y_e = 0.0;
  double theta_e = 0.0;
};

struct FollowerOutput {
  BodyVelocity cmd;
  ControllerState state;
  TrackingError error;
};

/// Default square formation: four followers around a center leader.
std::vector<FormationSlot> default_square_slots();

Pose slot_world_target(const Pose& leader, const FormationSlot& slot);

/// Point the follower law steers: center_offset ahead of the axle.
Point2 control_point(const Pose& pose, double offset);

TrackingError tracking_error(const Pose& leader, const BodyVelocity& leader_vel, const Pose& follower,
                             const FormationSlot& slot, const ControlGains& gains);

FollowerOutput follower_command(const Pose& leader, const BodyVelocity& leader_vel, const Pose& follower,
                                const FormationSlot& slot, const ControlGains& gains,
                                const ControllerState& ctrl, double dt_s);

/// Distance from the follower's control point to its slot target.
double slot_error(const Pose& leader, const Pose& follower, const FormationSlot& slot, double offset);

bool min_separation_ok(const std::vector<Pose>& poses, double min_separation);

}  // namespace fleet
