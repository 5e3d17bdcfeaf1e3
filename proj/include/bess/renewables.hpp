// Day-class weather synthesis and surrogate PV / wind power curves.
//
// The PV and wind models keep the inputs of the full physical models
// (irradiance, ambient temperature, time of day; wind speed and hub height)
// but use closed-form curves:
//
//   PV:   g_s = clamp(rating * ghi/ghi_stc * (1 + temp_coeff*(T_cell - 25)), 0, rating)
//         T_cell = temp + cell_temp_gain * ghi
//   Wind: v_hub = v * (hub/ref)^shear, cubic ramp between cut-in and rated,
//         flat at rating up to cut-out, zero elsewhere.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "core.hpp"

namespace bess {

struct PvConfig {
  double rating_kw = 4.95;
  double ghi_stc = 1000.0;
  double temp_coeff = -0.004;
  double cell_temp_gain = 0.03;

  void validate() const {
    if (!(rating_kw > 0.0)) throw ValidationError(ErrorKind::nonpositive_value, "pv.rating_kw must be > 0");
    if (!(ghi_stc > 0.0)) throw ValidationError(ErrorKind::nonpositive_value, "pv.ghi_stc must be > 0");
    if (temp_coeff > 0.0) throw ValidationError(ErrorKind::out_of_range, "pv.temp_coeff must be <= 0");
    if (cell_temp_gain < 0.0) throw ValidationError(ErrorKind::out_of_range, "pv.cell_temp_gain must be >= 0");
  }
};

struct WindConfig {
  double rating_kw = 6.0;
  double cut_in_ms = 3.0;
  double rated_ms = 12.0;
  double cut_out_ms = 25.0;
  double hub_height_m = 20.0;
  double ref_height_m = 10.0;
  double shear_exponent = 0.14;

  double hub_correction() const { return std::pow(hub_height_m / ref_height_m, shear_exponent); }

  void validate() const {
    if (!(rating_kw > 0.0)) throw ValidationError(ErrorKind::nonpositive_value, "wind.rating_kw must be > 0");
    if (!(cut_in_ms > 0.0 && cut_in_ms < rated_ms && rated_ms < cut_out_ms))
      throw ValidationError(ErrorKind::bounds_inverted, "wind speeds must satisfy 0 < cut_in < rated < cut_out");
    if (!(hub_height_m > 0.0 && ref_height_m > 0.0))
      throw ValidationError(ErrorKind::nonpositive_value, "wind heights must be > 0");
    if (shear_exponent < 0.0) throw ValidationError(ErrorKind::out_of_range, "wind.shear_exponent must be >= 0");
  }
};

enum class SolarClass { clear, partial_cloudy, cloudy };
enum class WindClass { high, middle, low };

struct WeatherDayClass {
  SolarClass solar = SolarClass::clear;
  WindClass wind = WindClass::high;
  friend bool operator==(const WeatherDayClass&, const WeatherDayClass&) = default;
};

inline const char* to_string(SolarClass c) {
  switch (c) {
    case SolarClass::clear: return "clear";
    case SolarClass::partial_cloudy: return "partial_cloudy";
    case SolarClass::cloudy: return "cloudy";
  }
  return "?";
}

inline const char* to_string(WindClass c) {
  switch (c) {
    case WindClass::high: return "high";
    case WindClass::middle: return "middle";
    case WindClass::low: return "low";
  }
  return "?";
}

inline SolarClass solar_class_from_string(const std::string& s) {
  if (s == "clear") return SolarClass::clear;
  if (s == "partial_cloudy" || s == "partial") return SolarClass::partial_cloudy;
  if (s == "cloudy") return SolarClass::cloudy;
  throw ValidationError(ErrorKind::unknown_name, "unknown solar class '" + s + "'");
}

inline WindClass wind_class_from_string(const std::string& s) {
  if (s == "high") return WindClass::high;
  if (s == "middle") return WindClass::middle;
  if (s == "low") return WindClass::low;
  throw ValidationError(ErrorKind::unknown_name, "unknown wind class '" + s + "'");
}

/// All nine (solar, wind) combinations, solar-major.
inline std::array<WeatherDayClass, 9> all_weather_classes() {
  std::array<WeatherDayClass, 9> out{};
  std::size_t i = 0;
  for (auto s : {SolarClass::clear, SolarClass::partial_cloudy, SolarClass::cloudy})
    for (auto w : {WindClass::high, WindClass::middle, WindClass::low}) out[i++] = {s, w};
  return out;
}

/// Numeric profile of each weather class. Engineering stand-ins; all tunable.
struct WeatherParams {
  double ghi_peak_clear = 1000.0;
  double cloudy_scale = 0.3;
  double partial_dip_min = 0.3;
  double sunrise_hour = 6.0;
  double sunset_hour = 18.0;
  std::array<double, 3> wind_mean_ms{10.0, 7.0, 4.0};  // high, middle, low
  double wind_noise_ms = 1.5;                           // uniform in +-noise
  std::array<double, 3> temp_mean_c{28.0, 26.0, 24.0};  // clear, partial, cloudy
  std::array<double, 3> temp_amplitude_c{6.0, 4.0, 2.0};
  double temp_peak_hour = 15.0;
};

struct DayWeather {
  std::vector<double> ghi;
  std::vector<double> temperature;
  std::vector<double> wind_speed;
};

/// Clear-sky irradiance at `hour`: half-sine between sunrise and sunset.
inline double clear_sky_ghi(double hour, const WeatherParams& p = {}) {
  if (hour <= p.sunrise_hour || hour >= p.sunset_hour) return 0.0;
  const double x = (hour - p.sunrise_hour) / (p.sunset_hour - p.sunrise_hour);
  return p.ghi_peak_clear * std::sin(std::numbers::pi * x);
}

namespace detail {
inline std::mt19937_64 day_rng(std::uint64_t seed, std::size_t day_index, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(day_index), stream};
  return std::mt19937_64(seq);
}
}  // namespace detail

/// Weather for one day at `slot_hours` resolution (24/slot_hours samples).
/// Deterministic in (cls, day_index, seed).
inline DayWeather synth_weather_day(WeatherDayClass cls, std::size_t day_index, std::uint64_t seed,
                                    double slot_hours = 1.0, const WeatherParams& p = {}) {
  const auto n = static_cast<std::size_t>(std::lround(24.0 / slot_hours));
  DayWeather w;
  w.ghi.resize(n);
  w.temperature.resize(n);
  w.wind_speed.resize(n);

  auto rng = detail::day_rng(seed, day_index, 0x5eed);
  std::uniform_real_distribution<double> dip(p.partial_dip_min, 1.0);
  std::uniform_real_distribution<double> gust(-p.wind_noise_ms, p.wind_noise_ms);

  const auto si = static_cast<std::size_t>(cls.solar);
  const auto wi = static_cast<std::size_t>(cls.wind);
  for (std::size_t i = 0; i < n; ++i) {
    const double hour = static_cast<double>(i) * slot_hours;
    double g = clear_sky_ghi(hour, p);
    // Draw unconditionally so the stream layout does not depend on the class.
    const double dip_factor = dip(rng);
    const double gust_ms = gust(rng);
    switch (cls.solar) {
      case SolarClass::clear: break;
      case SolarClass::partial_cloudy: g *= dip_factor; break;
      case SolarClass::cloudy: g *= p.cloudy_scale; break;
    }
    w.ghi[i] = g;
    w.temperature[i] = p.temp_mean_c[si] + p.temp_amplitude_c[si] *
                           std::sin(2.0 * std::numbers::pi * (hour - p.temp_peak_hour + 6.0) / 24.0);
    w.wind_speed[i] = std::max(0.0, p.wind_mean_ms[wi] + gust_ms);
  }
  return w;
}

inline double pv_output(double ghi, double temp_c, const PvConfig& cfg) {
  if (ghi <= 0.0) return 0.0;
  const double t_cell = temp_c + cfg.cell_temp_gain * ghi;
  const double kw = cfg.rating_kw * (ghi / cfg.ghi_stc) * (1.0 + cfg.temp_coeff * (t_cell - 25.0));
  return std::clamp(kw, 0.0, cfg.rating_kw);
}

/// Power curve evaluated on hub-height speed.
inline double wind_output_at_hub(double v_hub, const WindConfig& cfg) {
  if (v_hub < cfg.cut_in_ms || v_hub > cfg.cut_out_ms) return 0.0;
  if (v_hub >= cfg.rated_ms) return cfg.rating_kw;
  const double ci3 = cfg.cut_in_ms * cfg.cut_in_ms * cfg.cut_in_ms;
  const double r3 = cfg.rated_ms * cfg.rated_ms * cfg.rated_ms;
  return cfg.rating_kw * (v_hub * v_hub * v_hub - ci3) / (r3 - ci3);
}

/// `wind_speed` is measured at the reference height.
inline double wind_output(double wind_speed, const WindConfig& cfg) {
  return wind_output_at_hub(wind_speed * cfg.hub_correction(), cfg);
}

struct WeatherTraces {
  Trace ghi;
  Trace temperature;
  Trace wind_speed;
};

struct GenerationTraces {
  Trace solar;
  Trace wind;
  Trace total;
};

inline GenerationTraces generation_trace(const WeatherTraces& w, const PvConfig& pv, const WindConfig& wt) {
  if (!(w.ghi.grid == w.temperature.grid) || !(w.ghi.grid == w.wind_speed.grid) ||
      w.ghi.size() != w.temperature.size() || w.ghi.size() != w.wind_speed.size())
    throw ValidationError(ErrorKind::dimension_mismatch, "weather traces do not share one time grid");
  const std::size_t n = w.ghi.size();
  std::vector<double> gs(n), gw(n), g(n);
  for (std::size_t i = 0; i < n; ++i) {
    gs[i] = pv_output(w.ghi[i], w.temperature[i], pv);
    gw[i] = wind_output(w.wind_speed[i], wt);
    g[i] = gs[i] + gw[i];
  }
  return {Trace(w.ghi.grid, std::move(gs), TraceKind::generation),
          Trace(w.ghi.grid, std::move(gw), TraceKind::generation),
          Trace(w.ghi.grid, std::move(g), TraceKind::generation)};
}

/// Concatenates one synthesized day per calendar entry onto `grid`; a final
/// partial day is truncated.
inline WeatherTraces synth_weather(const std::vector<WeatherDayClass>& calendar, const TimeGrid& grid,
                                   std::uint64_t seed, const WeatherParams& p = {}) {
  const std::size_t per_day = grid.slots_per_day();
  if (per_day == 0 || calendar.size() != (grid.slot_count + per_day - 1) / per_day)
    throw ValidationError(ErrorKind::dimension_mismatch,
                          "weather calendar of " + std::to_string(calendar.size()) +
                              " days does not cover the time grid");
  std::vector<double> ghi, temp, wind;
  ghi.reserve(grid.slot_count);
  temp.reserve(grid.slot_count);
  wind.reserve(grid.slot_count);
  for (std::size_t d = 0; d < calendar.size(); ++d) {
    auto day = synth_weather_day(calendar[d], d, seed, grid.slot_length_hours, p);
    ghi.insert(ghi.end(), day.ghi.begin(), day.ghi.end());
    temp.insert(temp.end(), day.temperature.begin(), day.temperature.end());
    wind.insert(wind.end(), day.wind_speed.begin(), day.wind_speed.end());
  }
  ghi.resize(grid.slot_count);
  temp.resize(grid.slot_count);
  wind.resize(grid.slot_count);
  return {Trace(grid, std::move(ghi), TraceKind::ghi), Trace(grid, std::move(temp), TraceKind::temperature),
          Trace(grid, std::move(wind), TraceKind::wind_speed)};
}

}  // namespace bess
