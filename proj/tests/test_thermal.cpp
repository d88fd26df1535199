#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hvacrl/error.hpp"
#include "hvacrl/thermal.hpp"

using namespace hvacrl;

namespace {

ZoneParams passive_zone(double c, double u) {
  ZoneParams z;
  z.name = "z";
  z.capacitance = c;
  z.envelope_conductance = u;
  z.controller_gain = 1000.0;
  return z;
}

BuildingModel single(const ZoneParams& z) { return BuildingModel("one", {z}, {{0.0}}); }

BuildingState state_at(std::vector<double> temps) {
  BuildingState s;
  s.zone_rh.assign(temps.size(), 50.0);
  s.zone_temps = std::move(temps);
  return s;
}

WeatherRecord outdoor(double t_out, double rh = 50.0) {
  WeatherRecord w;
  w.t_out = t_out;
  w.h_out = rh;
  return w;
}

SetpointCommand band(std::size_t zones, double hs, double cs) {
  SetpointCommand c;
  c.zones.assign(zones, ZoneSetpoint{hs, cs});
  return c;
}

SetpointCommand off(std::size_t zones) { return band(zones, -100.0, 100.0); }

}  // namespace

TEST(ThermalStep, EquilibriumIsFixedPoint) {
  const auto m = single(passive_zone(1e6, 100.0));
  const auto s0 = state_at({22.0});
  const auto out = step(m, s0, outdoor(22.0), band(1, 20.0, 25.0), 900.0);
  EXPECT_EQ(out.state.zone_temps[0], 22.0);
  EXPECT_EQ(out.p_total, 0.0);
  EXPECT_EQ(out.state.energy_meter, 0.0);
  EXPECT_EQ(out.state.sim_time, 900.0);
}

TEST(ThermalStep, FreeResponseMatchesExponential) {
  auto z = passive_zone(1e6, 100.0);
  z.heat_capacity = 0.0;
  z.cool_capacity = 0.0;
  const auto m = single(z);
  auto s = state_at({30.0});
  double worst = 0.0;
  for (int k = 1; k <= 96; ++k) {
    s = step(m, s, outdoor(10.0), band(1, 20.0, 25.0), 900.0).state;
    const double exact = 10.0 + 20.0 * std::exp(-100.0 * 900.0 * k / 1e6);
    worst = std::max(worst, std::abs(s.zone_temps[0] - exact) / exact);
  }
  EXPECT_LT(worst, 1e-3);

  auto s1 = state_at({30.0});
  s1 = step(m, s1, outdoor(10.0), off(1), 10000.0).state;
  EXPECT_NEAR(s1.zone_temps[0], 17.3576, 1e-3 * 17.3576);
}

TEST(ThermalStep, HeatOnlyZoneNeverCools) {
  auto z = passive_zone(1e6, 100.0);
  z.heat_capacity = 5000.0;
  z.cool_capacity = 0.0;
  ASSERT_TRUE(z.heat_only());
  for (double cs : {18.0, 25.0, 35.0}) {
    EXPECT_GE(hvac_thermal_power(z, 40.0, ZoneSetpoint{15.0, cs}), 0.0);
  }
  const auto out = step(single(z), state_at({40.0}), outdoor(40.0), band(1, 15.0, 18.0), 900.0);
  EXPECT_EQ(out.p_total, 0.0);
}

TEST(ThermalStep, ProportionalPlant) {
  auto z = passive_zone(1e6, 0.0);
  z.heat_capacity = 3000.0;
  z.cool_capacity = 2000.0;
  z.controller_gain = 1000.0;
  EXPECT_DOUBLE_EQ(hvac_thermal_power(z, 19.0, {20.0, 25.0}), 1000.0);
  EXPECT_DOUBLE_EQ(hvac_thermal_power(z, 10.0, {20.0, 25.0}), 3000.0);
  EXPECT_DOUBLE_EQ(hvac_thermal_power(z, 22.0, {20.0, 25.0}), 0.0);
  EXPECT_DOUBLE_EQ(hvac_thermal_power(z, 25.5, {20.0, 25.0}), -500.0);
  EXPECT_DOUBLE_EQ(hvac_thermal_power(z, 40.0, {20.0, 25.0}), -2000.0);
  EXPECT_DOUBLE_EQ(hvac_thermal_power(z, 40.0, {20.0, std::nullopt}), 0.0);
}

TEST(ThermalStep, ElectricPowerUsesCopAndFan) {
  // Zero-capacity-change check: huge capacitance keeps temperature ~constant over one step.
  auto z = passive_zone(1e15, 0.0);
  z.heat_capacity = 3000.0;
  z.cool_capacity = 3000.0;
  z.cop_heat = 2.0;
  z.cop_cool = 4.0;
  z.controller_gain = 1000.0;
  const auto m = single(z);
  const auto heat = step(m, state_at({10.0}), outdoor(10.0), band(1, 20.0, 25.0), 900.0);
  EXPECT_NEAR(heat.p_total, 3000.0 / 2.0 + kFanPowerPerZone, 1e-6);
  const auto cool = step(m, state_at({30.0}), outdoor(30.0), band(1, 20.0, 25.0), 900.0);
  EXPECT_NEAR(cool.p_total, 3000.0 / 4.0 + kFanPowerPerZone, 1e-6);
  EXPECT_NEAR(cool.state.energy_meter, cool.p_total * 900.0, 1e-6);
}

TEST(ThermalStep, Errors) {
  const auto m = single(passive_zone(1e6, 100.0));
  const auto s = state_at({20.0});
  auto code = [&](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoFailure;
  };
  EXPECT_EQ(code([&] { step(m, s, outdoor(0), band(1, 20, 25), 0.0); }), Errc::NonPositiveDt);
  EXPECT_EQ(code([&] { step(m, s, outdoor(0), band(1, 20, 25), -5.0); }), Errc::NonPositiveDt);
  EXPECT_EQ(code([&] { step(m, s, outdoor(0), band(2, 20, 25), 900.0); }), Errc::ZoneCountMismatch);
  EXPECT_EQ(code([&] { step(m, state_at({20, 21}), outdoor(0), band(1, 20, 25), 900.0); }),
            Errc::ZoneCountMismatch);
  EXPECT_EQ(code([&] { step(m, s, outdoor(0), band(1, 26, 25), 900.0); }), Errc::InvalidConfig);
}

TEST(ThermalModel, Warehouse) {
  const auto m = warehouse_model();
  ASSERT_EQ(m.zone_count(), 3u);
  EXPECT_EQ(m.zone(0).name, "office");
  EXPECT_EQ(m.zone(1).name, "fine_storage");
  EXPECT_EQ(m.zone(2).name, "bulk_storage");
  EXPECT_EQ(m.zone(2).cool_capacity, 0.0);
  EXPECT_TRUE(m.zone(2).heat_only());
  EXPECT_FALSE(m.zone(0).heat_only());
  double area = 0.0;
  for (std::size_t z = 0; z < 3; ++z) {
    area += m.zone(z).floor_area;
    EXPECT_EQ(m.coupling(z, z), 0.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.coupling(z, j), m.coupling(j, z));
    EXPECT_DOUBLE_EQ(m.zone(z).capacitance, 200e3 * m.zone(z).floor_area);
    EXPECT_DOUBLE_EQ(m.zone(z).envelope_conductance, 1.0 * m.zone(z).floor_area);
  }
  EXPECT_DOUBLE_EQ(area, 4598.0);
}

TEST(ThermalModel, Datacenter) {
  const auto m = datacenter_model();
  ASSERT_EQ(m.zone_count(), 2u);
  EXPECT_EQ(m.zone(0).name, "west");
  EXPECT_EQ(m.zone(1).name, "east");
  EXPECT_NEAR(m.zone(0).floor_area + m.zone(1).floor_area, 491.3, 1e-9);
  for (std::size_t z = 0; z < 2; ++z) {
    EXPECT_GT(m.zone(z).cool_capacity, 0.0);
    EXPECT_GT(m.zone(z).heat_capacity, 0.0);
  }
}

TEST(ThermalModel, DatacenterCoolsInHeat) {
  const auto m = datacenter_model();
  auto s = state_at({22.0, 22.0});
  double cooling_energy = 0.0;
  for (int k = 0; k < 96; ++k) {
    const auto out = step(m, s, outdoor(35.0), band(2, 18.0, 27.0), 900.0);
    for (std::size_t z = 0; z < 2; ++z) {
      if (hvac_thermal_power(m.zone(z), out.state.zone_temps[z], {18.0, 27.0}) < 0.0) cooling_energy += 1.0;
    }
    s = out.state;
    if (k > 48) EXPECT_GT(out.p_total, 0.0);
  }
  EXPECT_GT(cooling_energy, 0.0);
  EXPECT_GT(s.energy_meter, 0.0);
}

TEST(ThermalModel, DatacenterIdleAtEquilibrium) {
  auto m = datacenter_model(0.0);
  std::vector<ZoneParams> zones = m.zones();
  for (auto& z : zones) z.occupant_gain = 0.0;
  const BuildingModel idle("dc", zones, m.coupling());
  const auto out = step(idle, state_at({22.0, 22.0}), outdoor(22.0), band(2, 18.0, 27.0), 900.0);
  EXPECT_EQ(out.p_total, 0.0);
  EXPECT_EQ(out.state.zone_temps[0], 22.0);
}

TEST(ThermalModel, RejectsBadMatrices) {
  const auto z = passive_zone(1e6, 10.0);
  EXPECT_THROW(BuildingModel("m", {z, z}, {{0.0, 1.0}, {2.0, 0.0}}), Error);
  EXPECT_THROW(BuildingModel("m", {z, z}, {{1.0, 1.0}, {1.0, 0.0}}), Error);
  EXPECT_THROW(BuildingModel("m", {z, z}, {{0.0, -1.0}, {-1.0, 0.0}}), Error);
  EXPECT_THROW(BuildingModel("m", {z, z}, {{0.0}}), Error);
  auto bad = z;
  bad.capacitance = 0.0;
  EXPECT_THROW(single(bad), Error);
  bad = z;
  bad.cop_cool = 0.0;
  EXPECT_THROW(single(bad), Error);
}

TEST(ThermalProperty, ContractionTowardAmbient) {
  // HVAC and gains off: the worst zone deviation from T_out never grows.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> temp(-10.0, 45.0);
  auto m = warehouse_model();
  std::vector<ZoneParams> zones = m.zones();
  for (auto& z : zones) {
    z.heat_capacity = 0.0;
    z.cool_capacity = 0.0;
    z.internal_gain_base = 0.0;
    z.occupant_gain = 0.0;
  }
  const BuildingModel coupled("w", zones, m.coupling());
  const BuildingModel uncoupled("w", zones, std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0)));
  for (double dt : {60.0, 300.0, 900.0, 3600.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      const double t_out = temp(rng);
      auto s = state_at({temp(rng), temp(rng), temp(rng)});
      auto u = s;
      for (int k = 0; k < 30; ++k) {
        double before = 0.0, after = 0.0;
        const auto next = step(coupled, s, outdoor(t_out), off(3), dt).state;
        for (std::size_t z = 0; z < 3; ++z) {
          before = std::max(before, std::abs(s.zone_temps[z] - t_out));
          after = std::max(after, std::abs(next.zone_temps[z] - t_out));
        }
        ASSERT_LE(after, before + 1e-12);
        s = next;

        const auto unext = step(uncoupled, u, outdoor(t_out), off(3), dt).state;
        for (std::size_t z = 0; z < 3; ++z) {
          ASSERT_LE(std::abs(unext.zone_temps[z] - t_out), std::abs(u.zone_temps[z] - t_out) + 1e-12);
        }
        u = unext;
      }
    }
  }
}

TEST(ThermalProperty, MeterMonotoneAndZeroIffIdle) {
  const auto m = warehouse_model();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> temp(-5.0, 40.0);
  std::uniform_real_distribution<double> sp(15.0, 30.0);
  auto s = state_at({21.0, 21.0, 21.0});
  int idle_steps = 0;
  for (int k = 0; k < 300; ++k) {
    const double a = sp(rng), b = sp(rng);
    const SetpointCommand cmd = band(3, std::min(a, b), std::max(a, b));
    const auto w = outdoor(temp(rng));
    const auto out = step(m, s, w, cmd, 900.0);
    ASSERT_GE(out.state.energy_meter, s.energy_meter);
    // Replay the step one sub-step at a time and look at the plant directly.
    bool delivered = false;
    auto probe = s;
    for (int sub = 0; sub < 15; ++sub) {
      for (std::size_t z = 0; z < 3; ++z) {
        if (hvac_thermal_power(m.zone(z), probe.zone_temps[z], cmd.zones[z]) != 0.0) delivered = true;
      }
      probe = step(m, probe, w, cmd, kSubStepSeconds).state;
    }
    EXPECT_EQ(out.state.energy_meter == s.energy_meter, !delivered);
    if (!delivered) ++idle_steps;
    s = out.state;
  }
  EXPECT_GT(idle_steps, 0);
}

TEST(ThermalProperty, MeterZeroWithoutDemand) {
  auto z = passive_zone(1e6, 50.0);
  z.heat_capacity = 1000.0;
  z.cool_capacity = 1000.0;
  const auto m = single(z);
  const auto idle = step(m, state_at({22.0}), outdoor(22.5), band(1, 18.0, 27.0), 900.0);
  EXPECT_EQ(idle.state.energy_meter, 0.0);
  const auto busy = step(m, state_at({16.0}), outdoor(10.0), band(1, 18.0, 27.0), 900.0);
  EXPECT_GT(busy.state.energy_meter, 0.0);
}

TEST(ThermalProperty, HigherHeatingSetpointNeverSavesEnergy) {
  const auto m = warehouse_model();
  for (double base : {15.0, 17.0, 19.0, 21.0}) {
    auto run = [&](double hs) {
      auto s = state_at({18.0, 18.0, 18.0});
      SetpointCommand cmd;
      cmd.zones = {{hs, 30.0}, {hs, 30.0}, {hs, std::nullopt}};
      for (int k = 0; k < 96; ++k) s = step(m, s, outdoor(0.0), cmd, 900.0).state;
      return s.energy_meter;
    };
    EXPECT_GE(run(base + 1.0), run(base)) << "base " << base;
  }
}

TEST(ThermalProperty, CouplingConservesHeat) {
  // No envelope, plant or gains: sum of C*T is invariant.
  auto a = passive_zone(2e6, 0.0);
  auto b = passive_zone(5e6, 0.0);
  a.heat_capacity = b.heat_capacity = 0.0;
  const BuildingModel m("pair", {a, b}, {{0.0, 400.0}, {400.0, 0.0}});
  auto s = state_at({30.0, 10.0});
  const double h0 = 2e6 * 30.0 + 5e6 * 10.0;
  for (int k = 0; k < 200; ++k) {
    s = step(m, s, outdoor(-20.0), off(2), 60.0).state;
    EXPECT_NEAR(2e6 * s.zone_temps[0] + 5e6 * s.zone_temps[1], h0, 1e-6 * h0);
  }
  EXPECT_LT(s.zone_temps[0], 30.0);
  EXPECT_GT(s.zone_temps[1], 10.0);
}

TEST(ThermalProperty, HumidityRelaxes) {
  const auto m = single(passive_zone(1e6, 0.0));
  BuildingState s = state_at({22.0});
  s.zone_rh = {90.0};
  const auto out = step(m, s, outdoor(22.0, 30.0), off(1), kHumidityTimeConstant);
  EXPECT_NEAR(out.state.zone_rh[0], 30.0 + 60.0 * std::exp(-1.0), 1e-9);
}

TEST(Occupancy, WeeklyPattern) {
  const OccupancySchedule sched{8, 18, 10.0, 2.0};
  EXPECT_EQ(sched.count(0), 0.0);           // Monday 00:00
  EXPECT_EQ(sched.count(9), 10.0);          // Monday 09:00
  EXPECT_EQ(sched.count(18), 0.0);          // Monday 18:00
  EXPECT_EQ(sched.count(4 * 24 + 17), 10.0);  // Friday 17:00
  EXPECT_EQ(sched.count(5 * 24 + 10), 2.0);   // Saturday 10:00
  EXPECT_EQ(sched.count(6 * 24 + 3), 0.0);    // Sunday 03:00
  EXPECT_EQ(sched.count(7 * 24 + 9), 10.0);   // next Monday
}
