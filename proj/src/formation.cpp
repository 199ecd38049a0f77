#include "fleet/formation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fleet {

void ControlGains::validate() const {
  if (!(k1 > 0 && k2 > 0 && k3 > 0 && k4 > 0 && k5 > 0 && k6 > 0)) {
    throw std::invalid_argument("formation gains must be positive");
  }
  if (!(v_max > 0 && w_max > 0)) {
    throw std::invalid_argument("velocity limits must be positive");
  }
  if (!(center_offset_d_m > 0)) {
    throw std::domain_error("center offset d must be nonzero");
  }
}

std::vector<FormationSlot> default_square_slots() {
  constexpr double deg = std::numbers::pi / 180.0;
  return {{0.6, 0.0, std::nullopt},
          {0.6, 90.0 * deg, std::nullopt},
          {0.6, 180.0 * deg, std::nullopt},
          {0.6, -90.0 * deg, std::nullopt}};
}

Pose slot_world_target(const Pose& leader, const FormationSlot& slot) {
  Pose target;
  target.x = leader.x + slot.rho_d * std::cos(leader.theta + slot.psi_d);
  target.y = leader.y + slot.rho_d * std::sin(leader.theta + slot.psi_d);
  target.theta = leader.theta;
  return target;
}

Point2 control_point(const Pose& pose, double offset) {
  return {pose.x + offset * std::cos(pose.theta), pose.y + offset * std::sin(pose.theta)};
}

namespace {

// Heading the slot target moves along; the leader's heading when the target
// is (nearly) still or moving backwards relative to the leader.
double target_heading(const Pose& leader, const BodyVelocity& vel, const FormationSlot& slot) {
  const double a = leader.theta + slot.psi_d;
  const double vx = vel.v * std::cos(leader.theta) - slot.rho_d * vel.w * std::sin(a);
  const double vy = vel.v * std::sin(leader.theta) + slot.rho_d * vel.w * std::cos(a);
  const double along = vx * std::cos(leader.theta) + vy * std::sin(leader.theta);
  if (std::hypot(vx, vy) < 1e-9 || along <= 0.0) {
    return leader.theta;
  }
  return std::atan2(vy, vx);
}

double shunt(double s, double e, double k, const ControlGains& g) {
  const double f = std::max(k * e, 0.0);
  const double h = std::max(-k * e, 0.0);
  return -g.k4 * s + (g.k5 - s) * f - (g.k6 + s) * h;
}

}  // namespace

TrackingError tracking_error(const Pose& leader, const BodyVelocity& leader_vel, const Pose& follower,
                             const FormationSlot& slot, const ControlGains& gains) {
  const Pose target = slot_world_target(leader, slot);
  const Point2 p = control_point(follower, gains.center_offset_d_m);
  const double ex = target.x - p.x;
  const double ey = target.y - p.y;
  const double c = std::cos(leader.theta);
  const double s = std::sin(leader.theta);
  return {c * ex + s * ey, -s * ex + c * ey,
          wrap_angle(target_heading(leader, leader_vel, slot) - follower.theta)};
}

FollowerOutput follower_command(const Pose& leader, const BodyVelocity& leader_vel, const Pose& follower,
                                const FormationSlot& slot, const ControlGains& gains,
                                const ControllerState& ctrl, double dt_s) {
  if (gains.center_offset_d_m == 0.0) {
    throw std::domain_error("center offset d must be nonzero");
  }
  FollowerOutput out;
  out.error = tracking_error(leader, leader_vel, follower, slot, gains);
  out.state.alpha = ctrl.alpha + dt_s * shunt(ctrl.alpha, out.error.x_e, gains.k1, gains);
  out.state.beta = ctrl.beta + dt_s * shunt(ctrl.beta, out.error.y_e, gains.k2, gains);

  const double th = wrap_angle(leader.theta - follower.theta);
  const double rw = slot.rho_d * leader_vel.w;
  const double ff_angle = gains.printed_sign_variant ? slot.psi_d - th : slot.psi_d + th;
  double v = gains.k1 * out.state.alpha + leader_vel.v * std::cos(th) - rw * std::sin(ff_angle);
  double w = (leader_vel.v * std::sin(th) + rw * std::cos(slot.psi_d + th) + gains.k2 * out.state.beta +
              gains.k3 * out.error.theta_e) /
             gains.center_offset_d_m;
  out.cmd.v = std::clamp(v, -gains.v_max, gains.v_max);
  out.cmd.w = std::clamp(w, -gains.w_max, gains.w_max);
  return out;
}

double slot_error(const Pose& leader, const Pose& follower, const FormationSlot& slot, double offset) {
  const Pose target = slot_world_target(leader, slot);
  const Point2 p = control_point(follower, offset);
  return std::hypot(target.x - p.x, target.y - p.y);
}

bool min_separation_ok(const std::vector<Pose>& poses, double min_separation) {
  for (std::size_t i = 0; i < poses.size(); ++i) {
    for (std::size_t j = i + 1; j < poses.size(); ++j) {
      if (std::hypot(poses[i].x - poses[j].x, poses[i].y - poses[j].y) < min_separation) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace fleet
