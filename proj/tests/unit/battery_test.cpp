#include <cmath>

#include <gtest/gtest.h>

#include "fleet/battery.hpp"

using namespace fleet;

namespace {

// Reference values from a 50-digit evaluation of the rational curve and of
// the implicit terminal-voltage relation V * (P/V)^n = curve(D), solved by
// fixed-point iteration to 1e-12.
constexpr double kCurveAt600 = 11.37197041738051906;
constexpr double kCurveAt840 = 11.25820273299580338;
constexpr double kCurveAt1200 = 10.27229502323756419;
constexpr double kV5WAt600 = 11.419024804176405378;
constexpr double kD5WAt600 = 600.12162937840199062;
constexpr double kV14WAt300 = 11.479393118874869572;
constexpr double kD14WAt300 = 300.33877129641066346;

}  // namespace

TEST(VoltageCurve, AnchorIsA1) {
  BatteryParams p;
  EXPECT_EQ(voltage_curve(p, 0.0), 12.0);
  p.a[0] = 0.0;
  EXPECT_EQ(voltage_curve(p, 0.0), 0.0);
}

TEST(VoltageCurve, MatchesHighPrecisionReference) {
  const BatteryParams p;
  EXPECT_NEAR(voltage_curve(p, 600.0), kCurveAt600, 1e-12);
  EXPECT_NEAR(voltage_curve(p, 840.0), kCurveAt840, 1e-12);
  EXPECT_NEAR(voltage_curve(p, 1200.0), kCurveAt1200, 1e-11);
}

TEST(VoltageCurve, FinitePositiveOverCapacity) {
  const BatteryParams p;
  for (int d = 0; d <= 1200; ++d) {
    const double v = voltage_curve(p, d);
    ASSERT_TRUE(std::isfinite(v)) << d;
    ASSERT_GT(v, 0.0) << d;
  }
}

TEST(VoltageCurve, PoleIsADomainError) {
  BatteryParams p;
  p.a = {1.0, -1.0, 0.0, 0.0, 0.0, 0.0};  // denominator 1 - D vanishes at D = 1
  EXPECT_THROW(voltage_curve(p, 1.0), std::domain_error);
}

TEST(DischargeStep, ZeroPowerHoldsDischarge) {
  const BatteryParams p;
  const BatteryState s = battery_state_at(p, 250.0);
  const DischargeResult r = discharge_step(p, s, 0.0, 1.0);
  EXPECT_EQ(r.state.discharge_mah, 250.0);
  EXPECT_EQ(r.state.last_current_a, 0.0);
  EXPECT_DOUBLE_EQ(r.state.voltage, voltage_curve(p, 250.0));
  EXPECT_FALSE(r.depleted);
}

TEST(DischargeStep, TwelveWattsFromFull) {
  // at D = 0 the curve is 12, so V = 12 V and I = 1 A exactly
  const BatteryParams p;
  const DischargeResult r = discharge_step(p, battery_state_at(p, 0.0), 12.0, 1.0);
  EXPECT_NEAR(r.state.voltage, 12.0, 1e-10);
  EXPECT_NEAR(r.state.last_current_a, 1.0, 1e-10);
  EXPECT_NEAR(r.state.discharge_mah, 1000.0 / 3600.0, 1e-10);
}

TEST(DischargeStep, MatchesFixedPointReference) {
  const BatteryParams p;
  DischargeResult r = discharge_step(p, battery_state_at(p, 600.0), 5.0, 1.0);
  EXPECT_NEAR(r.state.voltage, kV5WAt600, 1e-10);
  EXPECT_NEAR(r.state.discharge_mah, kD5WAt600, 1e-10);
  r = discharge_step(p, battery_state_at(p, 300.0), 14.0, 1.0);
  EXPECT_NEAR(r.state.voltage, kV14WAt300, 1e-10);
  EXPECT_NEAR(r.state.discharge_mah, kD14WAt300, 1e-10);
}

TEST(DischargeStep, CurrentTimesTimeConversion) {
  // pick the power that yields exactly 1.2 A at the loaded voltage
  const BatteryParams p;
  const BatteryState s = battery_state_at(p, 600.0);
  // V * I^n = curve  =>  V = curve / 1.2^n, P = 1.2 V
  const double v = voltage_curve(p, 600.0) / std::pow(1.2, p.n);
  const DischargeResult r = discharge_step(p, s, 1.2 * v, 1.0);
  EXPECT_NEAR(r.state.last_current_a, 1.2, 1e-12);
  EXPECT_NEAR(r.state.discharge_mah - 600.0, 1.2 * 1000.0 / 3600.0, 1e-12);
}

TEST(DischargeStep, MonotoneUnderLoad) {
  const BatteryParams p;
  BatteryState s = battery_state_at(p, 0.0);
  double prev_d = s.discharge_mah;
  double prev_v = 1e9;
  for (int i = 0; i < 4000; ++i) {
    s = discharge_step(p, s, 9.0, 1.0).state;
    ASSERT_GT(s.discharge_mah, prev_d);
    ASSERT_LE(s.voltage, prev_v + 1e-12);
    prev_d = s.discharge_mah;
    prev_v = s.voltage;
  }
}

TEST(DischargeStep, ClampsAtCapacityAndFlagsDepletion) {
  const BatteryParams p;
  const DischargeResult r = discharge_step(p, battery_state_at(p, 1199.9), 12.0, 10.0);
  EXPECT_TRUE(r.depleted);
  EXPECT_EQ(r.state.discharge_mah, p.capacity_mah);
  EXPECT_GT(r.state.voltage, 0.0);
}

TEST(DischargeStep, RejectsBadArguments) {
  const BatteryParams p;
  const BatteryState s = battery_state_at(p, 0.0);
  EXPECT_THROW(discharge_step(p, s, -1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(discharge_step(p, s, 1.0, 0.0), std::invalid_argument);
}

TEST(DischargeStep, HeavierLoadCrossesThresholdEarlier) {
  const BatteryParams p;
  auto crossing = [&](double watts) {
    BatteryState s = battery_state_at(p, 0.0);
    for (int t = 1; t < 100000; ++t) {
      s = discharge_step(p, s, watts, 1.0).state;
      if (s.voltage <= 11.5) return t;
    }
    return -1;
  };
  const int light = crossing(4.0);
  const int heavy = crossing(12.0);
  ASSERT_GT(light, 0);
  ASSERT_GT(heavy, 0);
  EXPECT_LT(heavy, light);
}

TEST(ChargeStep, Examples) {
  BatteryParams p;
  EXPECT_EQ(charge_step(p, battery_state_at(p, 0.0), 5.0).discharge_mah, 0.0);
  EXPECT_NEAR(charge_step(p, battery_state_at(p, 1200.0), 3600.0).discharge_mah, 0.0, 1e-12);
  p.charge_rate_ma = 600.0;
  const BatteryState s = charge_step(p, battery_state_at(p, 100.0), 60.0);
  EXPECT_NEAR(s.discharge_mah, 90.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.voltage, std::min(voltage_curve(p, 90.0), p.v_full));
}

TEST(ChargeStep, NeverLowersRemainingFraction) {
  const BatteryParams p;
  for (double d : {0.0, 1.0, 300.0, 1199.0, 1200.0}) {
    const BatteryState s = battery_state_at(p, d);
    EXPECT_GE(remaining_fraction(p, charge_step(p, s, 7.0)), remaining_fraction(p, s));
  }
}

TEST(RemainingFraction, Examples) {
  const BatteryParams p;
  EXPECT_EQ(remaining_fraction(p, battery_state_at(p, 0.0)), 1.0);
  EXPECT_EQ(remaining_fraction(p, battery_state_at(p, 1200.0)), 0.0);
  EXPECT_NEAR(remaining_fraction(p, battery_state_at(p, 840.0)), 0.30, 1e-15);
}

TEST(Inversion, CurveAndLoadedVoltage) {
  const BatteryParams p;
  const double d = discharge_at_curve_value(p, 11.5);
  EXPECT_NEAR(voltage_curve(p, d), 11.5, 1e-9);
  const double dl = discharge_at_loaded_voltage(p, 11.5, 9.0);
  EXPECT_NEAR(loaded_voltage(p, dl, 9.0), 11.5, 1e-9);
  // heavier draw reaches the same terminal voltage with less charge used
  EXPECT_LT(discharge_at_loaded_voltage(p, 11.5, 14.0), dl);
}

TEST(BatteryParams, Validation) {
  BatteryParams p;
  EXPECT_NO_THROW(p.validate());
  p.n = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.capacity_mah = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.charge_rate_ma = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
