#pragma once

namespace fleet {

inline constexpr double kGravity = 9.81;

/// Physical parameters of one differential-drive robot.
struct RobotParams {
  double wheel_radius_m = 0.035;
  double wheel_base_m = 0.115;
  double chassis_mass_kg = 1.5;
  double wheel_mass_kg = 0.1;
  double payload_share_kg = 0.0;  // assigned at runtime
  double torque_const_kt = 28.24e-3;
  double back_emf_ke = 28.24e-3;
  double armature_resistance_r = 2.4;
  double no_load_current_i0 = 0.06;
  double damping_b = 1e-5;
  double motor_efficiency_eta = 0.8;
  // Calibrated so a five-robot formation carrying 6 kg reaches 11.5 V from
  // full charge in about 25 minutes (see `fleetsim calibrate`).
  double rolling_resist_coeff = 0.0727;
  double center_offset_d_m = 0.05;

  /// Chassis, both wheels and the payload share.
  double total_mass_kg() const { return chassis_mass_kg + 2.0 * wheel_mass_kg + payload_share_kg; }
  void validate() const;
  bool operator==(const RobotParams&) const = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // wrapped to (-pi, pi]
  double phi_r = 0.0;
  double phi_l = 0.0;

  bool operator==(const Pose&) const = default;
};

struct BodyVelocity {
  double v = 0.0;
  double w = 0.0;

  bool operator==(const BodyVelocity&) const = default;
};

struct BodyAccel {
  double v_dot = 0.0;
  double w_dot = 0.0;
};

struct WheelPair {
  double right = 0.0;
  double left = 0.0;
};

double wrap_angle(double theta);

/// Explicit Euler step of the unicycle model; heading is taken at the start
/// of the step.
Pose integrate_kinematics(const Pose& pose, const BodyVelocity& vel, const RobotParams& params,
                          double dt_s);

/// Wheel angular rates (rad/s) for a body velocity.
WheelPair wheel_speeds(const BodyVelocity& vel, const RobotParams& params);

/// Planar inverse dynamics: per-wheel torques (N*m) needed for the given
/// acceleration plus rolling resistance.
WheelPair required_torques(const BodyVelocity& vel, const BodyAccel& accel, const RobotParams& params,
                           double total_mass_kg);

/// Yaw inertia used by required_torques.
double yaw_inertia(const RobotParams& params, double total_mass_kg);

/// Battery-side electrical power (W) drawn by both motors.
double electrical_power(const WheelPair& torque, const WheelPair& wheel_rate,
                        const RobotParams& params);

/// Convenience: power for a robot moving at `vel` with acceleration `accel`.
double drive_power(const BodyVelocity& vel, const BodyAccel& accel, const RobotParams& params);

}  // namespace fleet
