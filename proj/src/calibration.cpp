#include "fleet/calibration.hpp"

#include <cmath>
#include <stdexcept>

namespace fleet {

double time_to_voltage(const RobotParams& robot, const BatteryParams& battery, const BodyVelocity& vel, double volts,
                       double dt_s, double max_time_s) {
  const double power = drive_power(vel, {}, robot);
  BatteryState s = battery_state_at(battery, 0.0);
  long steps = 0;
  const long max_steps = std::lround(max_time_s / dt_s);
  while (steps < max_steps) {
    const DischargeResult r = discharge_step(battery, s, power, dt_s);
    s = r.state;
    ++steps;
    if (s.voltage <= volts || r.depleted) return static_cast<double>(steps) * dt_s;
  }
  return max_time_s;
}

CalibrationResult calibrate_rolling_resistance(RobotParams robot, const BatteryParams& battery,
                                               const CalibrationTarget& target) {
  if (target.formation_size < 1) throw std::invalid_argument("formation size must be >= 1");
  robot.payload_share_kg = target.payload_mass_kg / target.formation_size;
  auto endurance = [&](double mu) {
    robot.rolling_resist_coeff = mu;
    return time_to_voltage(robot, battery, target.velocity, target.threshold_voltage, target.dt_s,
                           100.0 * target.target_time_s);
  };
  double lo = 0.0;
  double hi = 1.0;
  CalibrationResult out;
  if (endurance(hi) > target.target_time_s) throw std::runtime_error("target unreachable with rolling resistance <= 1");
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    ++out.iterations;
    if (endurance(mid) > target.target_time_s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.rolling_resist_coeff = hi;
  out.time_s = endurance(hi);
  robot.rolling_resist_coeff = hi;
  out.power_w = drive_power(target.velocity, {}, robot);
  return out;
}

}  // namespace fleet
