#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hvacrl/weather.hpp"

namespace hvacrl {

/// Weekly occupancy pattern: `people` present on weekdays (Mon-Fri) between
/// `start_hour` (inclusive) and `end_hour` (exclusive), `weekend_people` on
/// Saturday/Sunday over the same hours, nobody otherwise. Hour 0 of a weather
/// series is Monday 00:00.
struct OccupancySchedule {
  int start_hour = 8;
  int end_hour = 18;
  double people = 0.0;
  double weekend_people = 0.0;

  double count(long long hour_of_series) const;
};

struct ZoneParams {
  std::string name;
  double capacitance = 1.0e6;        // J/K
  double envelope_conductance = 0.0; // W/K
  double heat_capacity = 0.0;        // W thermal
  double cool_capacity = 0.0;        // W thermal, 0 => heat-only zone
  double cop_heat = 1.0;
  double cop_cool = 1.0;
  double internal_gain_base = 0.0;   // W
  double occupant_gain = 0.0;        // W per person
  double controller_gain = 1.0;      // W/K
  double floor_area = 0.0;           // m2, informational
  OccupancySchedule occupancy;

  bool heat_only() const noexcept { return cool_capacity <= 0.0; }
};

class BuildingModel {
 public:
  BuildingModel(std::string name, std::vector<ZoneParams> zones,
                std::vector<std::vector<double>> interzone_conductance);

  const std::string& name() const noexcept { return name_; }
  std::size_t zone_count() const noexcept { return zones_.size(); }
  const std::vector<ZoneParams>& zones() const noexcept { return zones_; }
  const ZoneParams& zone(std::size_t z) const { return zones_[z]; }
  double coupling(std::size_t z, std::size_t j) const { return coupling_[z][j]; }
  const std::vector<std::vector<double>>& coupling() const noexcept { return coupling_; }

  /// Largest electric draw the plant can reach (every zone at full heating or
  /// full cooling, whichever costs more, plus fans).
  double max_electric_power() const;

 private:
  std::string name_;
  std::vector<ZoneParams> zones_;
  std::vector<std::vector<double>> coupling_;
};

struct BuildingState {
  std::vector<double> zone_temps;  // degC
  std::vector<double> zone_rh;     // %
  double energy_meter = 0.0;       // J electric, cumulative
  double sim_time = 0.0;           // s

  bool operator==(const BuildingState&) const = default;
};

struct ZoneSetpoint {
  double heating = 20.0;
  std::optional<double> cooling;

  bool operator==(const ZoneSetpoint&) const = default;
};

/// One entry per zone, in model order.
struct SetpointCommand {
  std::vector<ZoneSetpoint> zones;

  bool operator==(const SetpointCommand&) const = default;
};

struct StepOutput {
  BuildingState state;
  double p_total = 0.0;  // mean electric power over the step, W
};

/// Fixed integration sub-step.
inline constexpr double kSubStepSeconds = 60.0;
/// Supply fan draw per zone whenever that zone's plant is active.
inline constexpr double kFanPowerPerZone = 50.0;
/// Indoor humidity relaxes toward outdoor with this time constant.
inline constexpr double kHumidityTimeConstant = 3.0 * 3600.0;

/// Thermal HVAC power for one zone under proportional thermostat control.
/// Positive heats, negative cools.
double hvac_thermal_power(const ZoneParams& zone, double temp, const ZoneSetpoint& sp);

/// Advances the building by `dt` seconds under constant weather and setpoints.
StepOutput step(const BuildingModel& model, const BuildingState& state,
                const WeatherRecord& weather, const SetpointCommand& cmd, double dt);

/// Internal heat gains at a point in time, W.
double zone_gains(const ZoneParams& zone, double sim_time);

/// Default 3-zone warehouse (office, fine storage, bulk storage).
BuildingModel warehouse_model();

/// Default 2-zone datacenter (west, east). `it_gain` is the constant IT load
/// per zone in W.
BuildingModel datacenter_model(double it_gain = 10000.0);

}  // namespace hvacrl
