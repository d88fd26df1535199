#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace hvacrl {

/// One hour of outdoor conditions.
struct WeatherRecord {
  std::int64_t hour_index = 0;
  double t_out = 0.0;      // dry-bulb, degC
  double h_out = 0.0;      // relative humidity, %
  double v_out = 0.0;      // wind speed, m/s
  double w_out = 0.0;      // wind direction, degrees [0, 360)
  double s_diffuse = 0.0;  // diffuse horizontal radiation, W/m2
  double s_direct = 0.0;   // direct normal radiation, W/m2

  bool operator==(const WeatherRecord&) const = default;
};

/// Hourly series with consecutive hour indices starting at 0. Immutable once
/// built; construction validates the invariants.
class WeatherSeries {
 public:
  WeatherSeries(std::vector<WeatherRecord> records, std::string location_label);

  const std::vector<WeatherRecord>& records() const noexcept { return records_; }
  const std::string& location_label() const noexcept { return label_; }
  std::size_t size() const noexcept { return records_.size(); }
  const WeatherRecord& operator[](std::size_t i) const { return records_[i]; }

  /// Seconds covered between the first and last record.
  double duration_seconds() const noexcept {
    return 3600.0 * static_cast<double>(records_.size() - 1);
  }

 private:
  std::vector<WeatherRecord> records_;
  std::string label_;
};

struct WeatherSplit {
  WeatherSeries train;
  WeatherSeries eval;
  double fraction;
};

enum class ClimateProfile { Hot, Cool };

/// Parses an EnergyPlus Weather file: 8 header lines then hourly rows.
/// Missing-value sentinels are carried forward from the previous record.
WeatherSeries parse_epw(std::istream& in, std::string location_label = "epw");
WeatherSeries load_epw_file(const std::string& path);

/// Interpolated conditions at `t` seconds after the first record. Linear for
/// scalar fields, nearest hour for wind direction.
WeatherRecord sample(const WeatherSeries& series, double t);

/// Chronological prefix/suffix split; eval hour indices restart at 0.
WeatherSplit split(const WeatherSeries& series, double fraction);

WeatherSeries synthesize(ClimateProfile profile, std::uint64_t seed, std::int64_t hours);

/// Resolves `synthetic:hot`, `synthetic:cool` or a path to an .epw file.
WeatherSeries load_weather(const std::string& source, std::uint64_t seed,
                           std::int64_t synthetic_hours = 8760);

}  // namespace hvacrl
