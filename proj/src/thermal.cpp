#include "hvacrl/thermal.hpp"

#include <algorithm>
#include <cmath>

#include "hvacrl/error.hpp"

namespace hvacrl {

double OccupancySchedule::count(long long hour_of_series) const {
  if (hour_of_series < 0) return 0.0;
  const long long hour_of_day = hour_of_series % 24;
  const long long day_of_week = (hour_of_series / 24) % 7;  // 0 = Monday
  if (hour_of_day < start_hour || hour_of_day >= end_hour) return 0.0;
  return day_of_week >= 5 ? weekend_people : people;
}

BuildingModel::BuildingModel(std::string name, std::vector<ZoneParams> zones,
                             std::vector<std::vector<double>> interzone_conductance)
    : name_(std::move(name)), zones_(std::move(zones)), coupling_(std::move(interzone_conductance)) {
  const std::size_t n = zones_.size();
  if (n == 0) throw Error(Errc::InvalidConfig, "building has no zones");
  if (coupling_.size() != n) throw Error(Errc::ZoneCountMismatch, "interzone matrix row count");
  for (std::size_t z = 0; z < n; ++z) {
    if (coupling_[z].size() != n) throw Error(Errc::ZoneCountMismatch, "interzone matrix column count");
    if (coupling_[z][z] != 0.0) throw Error(Errc::InvalidConfig, "interzone diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      if (coupling_[z][j] < 0.0 || coupling_[z][j] != coupling_[j][z]) {
        throw Error(Errc::InvalidConfig, "interzone matrix must be symmetric and nonnegative");
      }
    }
    const auto& p = zones_[z];
    if (!(p.capacitance > 0.0) || p.envelope_conductance < 0.0 || p.heat_capacity < 0.0 ||
        p.cool_capacity < 0.0 || !(p.cop_heat > 0.0) || !(p.cop_cool > 0.0) ||
        !(p.controller_gain > 0.0)) {
      throw Error(Errc::InvalidConfig, "zone '" + p.name + "' has out-of-range parameters");
    }
  }
}

double BuildingModel::max_electric_power() const {
  double p = 0.0;
  for (const auto& z : zones_) {
    p += std::max(z.heat_capacity / z.cop_heat, z.cool_capacity / z.cop_cool) + kFanPowerPerZone;
  }
  return p;
}

double hvac_thermal_power(const ZoneParams& zone, double temp, const ZoneSetpoint& sp) {
  double q = std::clamp(zone.controller_gain * (sp.heating - temp), 0.0, zone.heat_capacity);
  if (!zone.heat_only() && sp.cooling) {
    q -= std::clamp(zone.controller_gain * (temp - *sp.cooling), 0.0, zone.cool_capacity);
  }
  return q;
}

double zone_gains(const ZoneParams& zone, double sim_time) {
  const auto hour = static_cast<long long>(std::floor(sim_time / 3600.0));
  return zone.internal_gain_base + zone.occupant_gain * zone.occupancy.count(hour);
}

StepOutput step(const BuildingModel& model, const BuildingState& state, const WeatherRecord& weather,
                const SetpointCommand& cmd, double dt) {
  if (!(dt > 0.0)) throw Error(Errc::NonPositiveDt, "dt=" + std::to_string(dt));
  const std::size_t n = model.zone_count();
  if (cmd.zones.size() != n || state.zone_temps.size() != n || state.zone_rh.size() != n) {
    throw Error(Errc::ZoneCountMismatch, "model has " + std::to_string(n) + " zones, command has " +
                                             std::to_string(cmd.zones.size()));
  }
  for (const auto& sp : cmd.zones) {
    if (sp.cooling && sp.heating > *sp.cooling) {
      throw Error(Errc::InvalidConfig, "heating setpoint above cooling setpoint");
    }
  }

  StepOutput out{state, 0.0};
  auto& temps = out.state.zone_temps;
  std::vector<double> next(n);
  double energy = 0.0;
  double t = state.sim_time;
  double remaining = dt;

  while (remaining > 0.0) {
    const double h = std::min(kSubStepSeconds, remaining);
    double power = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
      const auto& zone = model.zone(z);
      const double q = hvac_thermal_power(zone, temps[z], cmd.zones[z]);
      double exchange = 0.0;
      for (std::size_t j = 0; j < n; ++j) exchange += model.coupling(z, j) * (temps[j] - temps[z]);
      const double forcing = exchange + q + zone_gains(zone, t);

      // Trapezoidal on the envelope term, explicit in coupling/plant/gains.
      const double c_over_h = zone.capacitance / h;
      const double half_u = 0.5 * zone.envelope_conductance;
      next[z] = ((c_over_h - half_u) * temps[z] + zone.envelope_conductance * weather.t_out + forcing) /
                (c_over_h + half_u);

      if (q > 0.0) power += q / zone.cop_heat + kFanPowerPerZone;
      if (q < 0.0) power += -q / zone.cop_cool + kFanPowerPerZone;
    }
    temps.swap(next);
    energy += power * h;
    t += h;
    remaining -= h;
  }

  const double relax = std::exp(-dt / kHumidityTimeConstant);
  for (auto& rh : out.state.zone_rh) {
    rh = std::clamp(weather.h_out + (rh - weather.h_out) * relax, 0.0, 100.0);
  }
  out.state.energy_meter += energy;
  out.state.sim_time = state.sim_time + dt;
  out.p_total = energy / dt;
  return out;
}

}  // namespace hvacrl
