#include "fleet/battery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fleet {

namespace {

constexpr double kPoleTolerance = 1e-12;
constexpr double kIdlePowerW = 1e-9;

template <typename F>
double bisect_decreasing(F&& f, double target, double lo, double hi) {
  // f is non-increasing on [lo, hi]; find the first point where f <= target.
  if (f(lo) <= target) {
    return lo;
  }
  if (f(hi) > target) {
    return hi;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

void BatteryParams::validate() const {
  if (!(capacity_mah > 0.0)) {
    throw std::invalid_argument("battery capacity_mah must be positive");
  }
  if (!(n > 0.0 && n < 1.0)) {
    throw std::invalid_argument("battery exponent n must lie in (0, 1)");
  }
  if (!(charge_rate_ma >= 0.0)) {
    throw std::invalid_argument("battery charge_rate_ma must be non-negative");
  }
  if (!(v_full > 0.0)) {
    throw std::invalid_argument("battery v_full must be positive");
  }
}

double voltage_curve(const BatteryParams& p, double d) {
  const auto& a = p.a;
  const double num = a[0] + a[2] * d + a[4] * d * d;
  const double den = 1.0 + a[1] * d + a[3] * d * d + a[5] * d * d * d;
  if (std::abs(den) < kPoleTolerance) {
    throw std::domain_error("battery curve has a pole at D = " + std::to_string(d) + " mAh");
  }
  return num / den;
}

double loaded_voltage(const BatteryParams& p, double d, double power_w) {
  const double curve = voltage_curve(p, d);
  if (!(curve > 0.0)) {
    throw std::domain_error("battery curve is non-positive at D = " + std::to_string(d) + " mAh");
  }
  if (power_w < kIdlePowerW) {
    return std::min(curve, p.v_full);
  }
  const double v = std::pow(curve / std::pow(power_w, p.n), 1.0 / (1.0 - p.n));
  return std::min(v, p.v_full);
}

BatteryState battery_state_at(const BatteryParams& p, double d) {
  const double clamped = std::clamp(d, 0.0, p.capacity_mah);
  return BatteryState{clamped, std::min(voltage_curve(p, clamped), p.v_full), 0.0};
}

DischargeResult discharge_step(const BatteryParams& p, const BatteryState& s, double power_w,
                               double dt_s) {
  if (!(power_w >= 0.0)) {
    throw std::invalid_argument("electrical power must be non-negative");
  }
  if (!(dt_s > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
  DischargeResult out;
  if (power_w < kIdlePowerW) {
    out.state = BatteryState{s.discharge_mah, loaded_voltage(p, s.discharge_mah, 0.0), 0.0};
    return out;
  }
  const double v = loaded_voltage(p, s.discharge_mah, power_w);
  const double current = power_w / v;
  double d = s.discharge_mah + current * dt_s * kMahPerAmpSecond;
  if (d > p.capacity_mah) {
    d = p.capacity_mah;
    out.depleted = true;
  }
  out.state = BatteryState{d, v, current};
  return out;
}

BatteryState charge_step(const BatteryParams& p, const BatteryState& s, double dt_s) {
  if (!(dt_s > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
  if (s.discharge_mah <= 0.0 || p.charge_rate_ma <= 0.0) {
    return BatteryState{std::max(s.discharge_mah, 0.0),
                        loaded_voltage(p, std::max(s.discharge_mah, 0.0), 0.0), 0.0};
  }
  const double d = std::max(s.discharge_mah - p.charge_rate_ma * dt_s / 3600.0, 0.0);
  return BatteryState{d, loaded_voltage(p, d, 0.0), -p.charge_rate_ma / 1000.0};
}

double remaining_fraction(const BatteryParams& p, const BatteryState& s) {
  return std::clamp(1.0 - s.discharge_mah / p.capacity_mah, 0.0, 1.0);
}

double discharge_at_curve_value(const BatteryParams& p, double value) {
  return bisect_decreasing([&](double d) { return voltage_curve(p, d); }, value, 0.0,
                           p.capacity_mah);
}

double discharge_at_loaded_voltage(const BatteryParams& p, double volts, double power_w) {
  return bisect_decreasing([&](double d) { return loaded_voltage(p, d, power_w); }, volts, 0.0,
                           p.capacity_mah);
}

}  // namespace fleet
