#pragma once

#include "fleet/battery.hpp"
#include "fleet/drivetrain.hpp"

namespace fleet {

/// Steady-motion endurance target used to pick the rolling resistance.
struct CalibrationTarget {
  double payload_mass_kg = 6.0;
  int formation_size = 5;
  BodyVelocity velocity{0.06, 0.05};
  double threshold_voltage = 11.5;
  double target_time_s = 1500.0;
  double dt_s = 0.1;
};

struct CalibrationResult {
  double rolling_resist_coeff = 0.0;
  double time_s = 0.0;
  double power_w = 0.0;
  int iterations = 0;
};

/// Seconds of constant-velocity driving from full charge until the loaded
/// voltage is at or below `volts`. Returns `max_time_s` if never reached.
double time_to_voltage(const RobotParams& robot, const BatteryParams& battery, const BodyVelocity& vel, double volts,
                       double dt_s, double max_time_s = 1e6);

/// Bisection on rolling_resist_coeff in [0, 1] until the target time is hit
/// within one timestep.
CalibrationResult calibrate_rolling_resistance(RobotParams robot, const BatteryParams& battery,
                                               const CalibrationTarget& target);

}  // namespace fleet
