#pragma once

#include <array>

namespace fleet {

/// Milliamp-hours accumulated per ampere-second of current.
inline constexpr double kMahPerAmpSecond = 1000.0 / 3600.0;

/// Empirical Li-Ion pack model. The discharge curve is a rational fit of the
/// quantity V*I^n against accumulated discharge D (mAh):
///
///   V*I^n(D) = (a1 + a3 D + a5 D^2) / (1 + a2 D + a4 D^2 + a6 D^3)
struct BatteryParams {
  std::array<double, 6> a{12.0, 3.409, 39.55, -0.002653, -0.03203, -8.112e-8};
  double n = 0.005;
  double capacity_mah = 1200.0;
  double v_full = 12.0;
  double charge_rate_ma = 1200.0;

  void validate() const;
  bool operator==(const BatteryParams&) const = default;
};

struct BatteryState {
  double discharge_mah = 0.0;
  double voltage = 12.0;
  double last_current_a = 0.0;

  bool operator==(const BatteryState&) const = default;
};

struct DischargeResult {
  BatteryState state;
  /// Set when the step would have pushed discharge past capacity. The state
  /// is clamped at capacity and the robot must be halted.
  bool depleted = false;
};

/// Evaluates the fitted V*I^n curve. Throws std::domain_error when the
/// denominator is within 1e-12 of a pole.
double voltage_curve(const BatteryParams& params, double discharge_mah);

/// Terminal voltage while delivering `power_w` at the given discharge.
double loaded_voltage(const BatteryParams& params, double discharge_mah, double power_w);

/// State with voltage evaluated at rest for the given discharge.
BatteryState battery_state_at(const BatteryParams& params, double discharge_mah);

DischargeResult discharge_step(const BatteryParams& params, const BatteryState& state,
                               double electrical_power_w, double dt_s);

/// Constant-current recharge at params.charge_rate_ma.
BatteryState charge_step(const BatteryParams& params, const BatteryState& state, double dt_s);

double remaining_fraction(const BatteryParams& params, const BatteryState& state);

/// Smallest discharge in [0, capacity] at which voltage_curve drops to `value`.
/// Returns 0 if the curve starts below `value` and capacity if it never gets there.
double discharge_at_curve_value(const BatteryParams& params, double value);

/// Same inversion for the loaded terminal voltage at a fixed power draw.
double discharge_at_loaded_voltage(const BatteryParams& params, double volts, double power_w);

}  // namespace fleet
