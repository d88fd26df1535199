// Default building parameter tables.
//
// Capacitance and envelope conductance scale with floor area at
// 200 kJ/(K m2) and 1.0 W/(K m2). Zone areas follow the reference warehouse
// split (office 232 m2, fine storage 1394 m2, bulk storage 2972 m2, 4598 m2
// total) and an even split of the 491.3 m2 datacenter. Plant sizes, COPs and
// gains are order-of-magnitude choices, overridable from the config file.

#include "hvacrl/thermal.hpp"

namespace hvacrl {

namespace {

constexpr double kCapacitancePerArea = 200.0e3;  // J/(K m2)
constexpr double kConductancePerArea = 1.0;      // W/(K m2)

ZoneParams area_scaled_zone(std::string name, double area) {
  ZoneParams z;
  z.name = std::move(name);
  z.floor_area = area;
  z.capacitance = kCapacitancePerArea * area;
  z.envelope_conductance = kConductancePerArea * area;
  return z;
}

}  // namespace

BuildingModel warehouse_model() {
  ZoneParams office = area_scaled_zone("office", 232.0);
  office.heat_capacity = 15000.0;
  office.cool_capacity = 15000.0;
  office.cop_heat = 3.0;
  office.cop_cool = 3.0;
  office.internal_gain_base = 1500.0;
  office.occupant_gain = 120.0;
  office.controller_gain = 7500.0;
  office.occupancy = {8, 18, 10.0, 0.0};

  ZoneParams fine = area_scaled_zone("fine_storage", 1394.0);
  fine.heat_capacity = 60000.0;
  fine.cool_capacity = 50000.0;
  fine.cop_heat = 3.0;
  fine.cop_cool = 3.0;
  fine.internal_gain_base = 5000.0;
  fine.occupant_gain = 120.0;
  fine.controller_gain = 30000.0;
  fine.occupancy = {8, 18, 5.0, 0.0};

  // Heat-only: electric unit heaters, no cooling coil.
  ZoneParams bulk = area_scaled_zone("bulk_storage", 2972.0);
  bulk.heat_capacity = 110000.0;
  bulk.cool_capacity = 0.0;
  bulk.cop_heat = 1.0;
  bulk.cop_cool = 1.0;
  bulk.internal_gain_base = 6000.0;
  bulk.occupant_gain = 120.0;
  bulk.controller_gain = 55000.0;
  bulk.occupancy = {8, 18, 5.0, 0.0};

  std::vector<std::vector<double>> k = {
      {0.0, 150.0, 0.0},
      {150.0, 0.0, 800.0},
      {0.0, 800.0, 0.0},
  };
  return BuildingModel("warehouse", {office, fine, bulk}, std::move(k));
}

BuildingModel datacenter_model(double it_gain) {
  auto make = [it_gain](std::string name) {
    ZoneParams z = area_scaled_zone(std::move(name), 491.3 / 2.0);
    z.heat_capacity = 10000.0;
    z.cool_capacity = 40000.0;
    z.cop_heat = 3.0;
    z.cop_cool = 3.0;
    z.internal_gain_base = it_gain;
    z.occupant_gain = 120.0;
    z.controller_gain = 10000.0;
    z.occupancy = {8, 18, 2.0, 0.0};
    return z;
  };
  std::vector<std::vector<double>> k = {{0.0, 300.0}, {300.0, 0.0}};
  return BuildingModel("datacenter", {make("west"), make("east")}, std::move(k));
}

}  // namespace hvacrl
