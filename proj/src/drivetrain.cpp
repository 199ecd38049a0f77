#include "fleet/drivetrain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fleet {

void RobotParams::validate() const {
  const bool positive = wheel_radius_m > 0 && wheel_base_m > 0 && chassis_mass_kg > 0 &&
                        wheel_mass_kg > 0 && torque_const_kt > 0 && back_emf_ke > 0 &&
                        armature_resistance_r > 0 && center_offset_d_m > 0;
  if (!positive) {
    throw std::invalid_argument("robot physical parameters must be positive");
  }
  if (payload_share_kg < 0 || no_load_current_i0 < 0 || damping_b < 0 || rolling_resist_coeff < 0) {
    throw std::invalid_argument("robot payload, no-load current, damping and rolling resistance must be >= 0");
  }
  if (!(motor_efficiency_eta > 0 && motor_efficiency_eta <= 1)) {
    throw std::invalid_argument("motor efficiency must lie in (0, 1]");
  }
}

double wrap_angle(double theta) {
  double a = std::remainder(theta, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) {
    a += 2.0 * std::numbers::pi;
  }
  return a;
}

Pose integrate_kinematics(const Pose& pose, const BodyVelocity& vel, const RobotParams& params,
                          double dt_s) {
  const WheelPair rate = wheel_speeds(vel, params);
  Pose next = pose;
  next.x += vel.v * std::cos(pose.theta) * dt_s;
  next.y += vel.v * std::sin(pose.theta) * dt_s;
  next.theta = wrap_angle(pose.theta + vel.w * dt_s);
  next.phi_r += rate.right * dt_s;
  next.phi_l += rate.left * dt_s;
  return next;
}

WheelPair wheel_speeds(const BodyVelocity& vel, const RobotParams& params) {
  const double half_base = 0.5 * params.wheel_base_m;
  return {(vel.v + vel.w * half_base) / params.wheel_radius_m,
          (vel.v - vel.w * half_base) / params.wheel_radius_m};
}

double yaw_inertia(const RobotParams& params, double total_mass_kg) {
  const double half_base = 0.5 * params.wheel_base_m;
  // body treated as mass concentrated at the wheel track, plus the two wheel
  // discs spinning about their diameters
  const double wheel_disc = 0.25 * params.wheel_mass_kg * params.wheel_radius_m * params.wheel_radius_m;
  return total_mass_kg * half_base * half_base + 2.0 * wheel_disc;
}

WheelPair required_torques(const BodyVelocity& vel, const BodyAccel& accel, const RobotParams& params,
                           double total_mass_kg) {
  if (!(total_mass_kg > 0.0)) {
    throw std::invalid_argument("total mass must be positive");
  }
  const double sign_v = (vel.v > 0.0) - (vel.v < 0.0);
  const double force =
      total_mass_kg * accel.v_dot + params.rolling_resist_coeff * total_mass_kg * kGravity * sign_v;
  const double moment = yaw_inertia(params, total_mass_kg) * accel.w_dot;
  const double r = params.wheel_radius_m;
  const double L = params.wheel_base_m;
  return {r * (0.5 * force + moment / L), r * (0.5 * force - moment / L)};
}

double electrical_power(const WheelPair& torque, const WheelPair& wheel_rate,
                        const RobotParams& params) {
  auto motor = [&](double tau, double rate) {
    const double current = (tau + params.damping_b * rate) / params.torque_const_kt +
                           params.no_load_current_i0;
    const double volts = current * params.armature_resistance_r + params.back_emf_ke * rate;
    const double p_elec = std::max(volts * current, 0.0);
    const double p_mech = tau * rate / params.motor_efficiency_eta;
    return std::max(p_elec, p_mech);
  };
  return motor(torque.right, wheel_rate.right) + motor(torque.left, wheel_rate.left);
}

double drive_power(const BodyVelocity& vel, const BodyAccel& accel, const RobotParams& params) {
  const WheelPair tau = required_torques(vel, accel, params, params.total_mass_kg());
  return electrical_power(tau, wheel_speeds(vel, params), params);
}

}  // namespace fleet
