#include "hvacrl/weather.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>

#include "hvacrl/error.hpp"

namespace hvacrl {

namespace {

constexpr std::size_t kHeaderLines = 8;
constexpr std::size_t kMinFields = 22;

// 0-indexed EPW columns.
constexpr std::size_t kColDryBulb = 6;
constexpr std::size_t kColRelHum = 8;
constexpr std::size_t kColDirectNormal = 14;
constexpr std::size_t kColDiffuseHoriz = 15;
constexpr std::size_t kColWindDir = 20;
constexpr std::size_t kColWindSpeed = 21;

constexpr double kMissingTemp = 99.9;
constexpr double kMissingHumidity = 999.0;
constexpr double kMissingRadiation = 9999.0;
constexpr double kMissingWind = 999.0;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& value) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc{} && ptr == end && std::isfinite(value);
}

bool is_missing(double value, double sentinel) { return value >= sentinel - 1e-9; }

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

void check_record(const WeatherRecord& r) {
  const bool ok = r.h_out >= 0.0 && r.h_out <= 100.0 && r.v_out >= 0.0 && r.s_diffuse >= 0.0 &&
                  r.s_direct >= 0.0 && r.w_out >= 0.0 && r.w_out < 360.0 &&
                  std::isfinite(r.t_out);
  if (!ok) {
    throw Error(Errc::InvalidConfig,
                "weather record at hour " + std::to_string(r.hour_index) + " violates field ranges");
  }
}

}  // namespace

WeatherSeries::WeatherSeries(std::vector<WeatherRecord> records, std::string location_label)
    : records_(std::move(records)), label_(std::move(location_label)) {
  if (records_.empty()) throw Error(Errc::EmptyWeather, "weather series has no records");
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].hour_index != static_cast<std::int64_t>(i)) {
      throw Error(Errc::InvalidConfig, "hour_index must count up from 0 by 1");
    }
    check_record(records_[i]);
  }
}

WeatherSeries parse_epw(std::istream& in, std::string location_label) {
  std::string line;
  std::size_t header = 0;
  std::size_t line_no = 0;
  std::vector<std::string> data_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (data_lines.empty()) {
      // Header lines start with a keyword; data rows start with the year.
      double year = 0.0;
      const auto fields = split_fields(line);
      if (!parse_double(fields.front(), year)) {
        ++header;
        continue;
      }
      if (header < kHeaderLines) {
        throw Error(Errc::TooFewHeaderLines, "found " + std::to_string(header) +
                                                 " header lines before the first data row, need " +
                                                 std::to_string(kHeaderLines));
      }
    }
    data_lines.push_back(line);
  }
  if (header < kHeaderLines) {
    throw Error(Errc::TooFewHeaderLines,
                "found " + std::to_string(header) + " header lines, need " + std::to_string(kHeaderLines));
  }
  if (data_lines.empty()) throw Error(Errc::EmptyWeather, "EPW input has no data rows");

  std::vector<WeatherRecord> records;
  records.reserve(data_lines.size());
  for (std::size_t row = 0; row < data_lines.size(); ++row) {
    const auto fields = split_fields(data_lines[row]);
    const std::size_t row_no = row + 1;
    if (fields.size() < kMinFields) {
      throw Error(Errc::RowFieldCountBelow22, "data row " + std::to_string(row_no) + " has " +
                                                  std::to_string(fields.size()) + " fields");
    }
    auto numeric = [&](std::size_t col) {
      double v = 0.0;
      if (!parse_double(fields[col], v)) {
        throw Error(Errc::NonNumericField,
                    "data row " + std::to_string(row_no) + ", column " + std::to_string(col) + ": '" +
                        std::string(fields[col]) + "'");
      }
      return v;
    };

    const WeatherRecord* prev = records.empty() ? nullptr : &records.back();
    WeatherRecord r;
    r.hour_index = static_cast<std::int64_t>(row);

    const double t = numeric(kColDryBulb);
    r.t_out = is_missing(t, kMissingTemp) ? (prev ? prev->t_out : 20.0) : t;
    const double h = numeric(kColRelHum);
    r.h_out = is_missing(h, kMissingHumidity) ? (prev ? prev->h_out : 50.0) : std::clamp(h, 0.0, 100.0);
    const double direct = numeric(kColDirectNormal);
    r.s_direct = is_missing(direct, kMissingRadiation) ? (prev ? prev->s_direct : 0.0)
                                                       : std::max(direct, 0.0);
    const double diffuse = numeric(kColDiffuseHoriz);
    r.s_diffuse = is_missing(diffuse, kMissingRadiation) ? (prev ? prev->s_diffuse : 0.0)
                                                         : std::max(diffuse, 0.0);
    const double wdir = numeric(kColWindDir);
    r.w_out = is_missing(wdir, kMissingWind) ? (prev ? prev->w_out : 0.0) : wrap_degrees(wdir);
    const double wspd = numeric(kColWindSpeed);
    r.v_out = is_missing(wspd, kMissingWind) ? (prev ? prev->v_out : 0.0) : std::max(wspd, 0.0);
    records.push_back(r);
  }
  return WeatherSeries(std::move(records), std::move(location_label));
}

WeatherSeries load_epw_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open weather file " + path);
  return parse_epw(in, path);
}

WeatherRecord sample(const WeatherSeries& series, double t) {
  const double t_max = series.duration_seconds();
  if (!(t >= 0.0 && t <= t_max)) {
    throw Error(Errc::TimeOutOfRange, "t=" + std::to_string(t) + " s outside [0, " +
                                          std::to_string(t_max) + "]");
  }
  const auto& recs = series.records();
  const double hours = t / 3600.0;
  const auto i = std::min(static_cast<std::size_t>(std::floor(hours)), recs.size() - 1);
  if (i + 1 >= recs.size()) return recs.back();
  const double f = hours - static_cast<double>(i);
  if (f == 0.0) return recs[i];

  const auto& a = recs[i];
  const auto& b = recs[i + 1];
  auto lerp = [f](double x, double y) { return x + f * (y - x); };
  WeatherRecord r;
  r.hour_index = a.hour_index;
  r.t_out = lerp(a.t_out, b.t_out);
  r.h_out = lerp(a.h_out, b.h_out);
  r.v_out = lerp(a.v_out, b.v_out);
  r.s_diffuse = lerp(a.s_diffuse, b.s_diffuse);
  r.s_direct = lerp(a.s_direct, b.s_direct);
  r.w_out = f < 0.5 ? a.w_out : b.w_out;
  return r;
}

WeatherSplit split(const WeatherSeries& series, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(Errc::DegenerateSplit, "fraction must lie in (0,1), got " + std::to_string(fraction));
  }
  const auto total = static_cast<std::int64_t>(series.size());
  const auto n_train = std::llround(fraction * static_cast<double>(total));
  if (n_train <= 0 || n_train >= total) {
    throw Error(Errc::DegenerateSplit, "split of " + std::to_string(total) + " records at " +
                                           std::to_string(fraction) + " leaves one side empty");
  }
  const auto& recs = series.records();
  std::vector<WeatherRecord> train(recs.begin(), recs.begin() + n_train);
  std::vector<WeatherRecord> eval(recs.begin() + n_train, recs.end());
  for (std::size_t i = 0; i < eval.size(); ++i) eval[i].hour_index = static_cast<std::int64_t>(i);
  return WeatherSplit{WeatherSeries(std::move(train), series.location_label() + ":train"),
                      WeatherSeries(std::move(eval), series.location_label() + ":eval"), fraction};
}

WeatherSeries synthesize(ClimateProfile profile, std::uint64_t seed, std::int64_t hours) {
  if (hours < 2) throw Error(Errc::HoursTooSmall, "need at least 2 hours, got " + std::to_string(hours));

  struct Params {
    double mean, season_amp, day_amp;
    double rh_base, rh_per_degc;
    double wind_mean, wind_dir;
    double direct_peak, diffuse_peak;
  };
  // Hot desert vs. mild maritime. Constants are stand-ins, not station fits.
  const Params p = profile == ClimateProfile::Hot
                       ? Params{22.0, 10.0, 8.0, 30.0, 2.5, 3.5, 135.0, 850.0, 110.0}
                       : Params{10.0, 7.0, 5.0, 75.0, 2.0, 4.5, 250.0, 550.0, 160.0};

  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr double half_pi = 0.5 * std::numbers::pi;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<WeatherRecord> recs;
  recs.reserve(static_cast<std::size_t>(hours));
  double wind_dir = p.wind_dir;
  for (std::int64_t h = 0; h < hours; ++h) {
    const double hod = static_cast<double>(h % 24);
    const double season = std::sin(two_pi * static_cast<double>(h) / 8760.0 - half_pi);
    const double diurnal = p.day_amp * std::sin(two_pi * hod / 24.0 - half_pi);

    WeatherRecord r;
    r.hour_index = h;
    r.t_out = p.mean + p.season_amp * season + diurnal + unit(rng);
    r.h_out = std::clamp(p.rh_base - p.rh_per_degc * diurnal + 4.0 * unit(rng), 10.0, 100.0);
    r.v_out = std::max(0.0, p.wind_mean + 1.5 * unit(rng));
    wind_dir = wrap_degrees(wind_dir + 15.0 * unit(rng));
    r.w_out = wind_dir;

    // Daylight 06:00-18:00, longer/stronger toward mid-year.
    const double daylight = std::sin(std::numbers::pi * (hod - 6.0) / 12.0);
    const double strength = 0.8 + 0.2 * season;
    const double sun = (hod > 6.0 && hod < 18.0) ? std::max(0.0, daylight) * strength : 0.0;
    r.s_direct = p.direct_peak * sun;
    r.s_diffuse = p.diffuse_peak * sun;
    recs.push_back(r);
  }
  return WeatherSeries(std::move(recs),
                       profile == ClimateProfile::Hot ? "synthetic:hot" : "synthetic:cool");
}

WeatherSeries load_weather(const std::string& source, std::uint64_t seed, std::int64_t synthetic_hours) {
  if (source == "synthetic:hot") return synthesize(ClimateProfile::Hot, seed, synthetic_hours);
  if (source == "synthetic:cool") return synthesize(ClimateProfile::Cool, seed, synthetic_hours);
  if (source.rfind("synthetic:", 0) == 0) {
    throw Error(Errc::InvalidConfig, "unknown synthetic profile '" + source + "'");
  }
  return load_epw_file(source);
}

}  // namespace hvacrl
