// Scenario configuration: validation, JSON (de)serialization, built-in city
// calendars and assembly of the per-slot demand / weather / generation traces.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "battery.hpp"
#include "billing.hpp"
#include "core.hpp"
#include "demand.hpp"
#include "renewables.hpp"

namespace bess {

enum class RewardMode { exponential, linear };

struct EnvOptions {
  std::size_t action_levels = 9;  // K, odd
  RewardMode reward = RewardMode::exponential;
  /// Scale discharge levels by min(b_max, deficit / eta_discharge) so the
  /// battery never pushes more than the load draws.
  bool cap_discharge_at_deficit = true;
};

/// Optional trace files replacing synthesis; paths relative to the scenario file.
struct TraceFiles {
  std::string demand;
  std::string ghi;
  std::string temperature;
  std::string wind_speed;
};

struct ScenarioConfig {
  std::string name = "default";
  std::string city = "shanghai";
  BsType bs_type = BsType::resident;
  TimeGrid grid;
  std::vector<WeatherDayClass> weather_calendar;
  WeatherParams weather;
  Tariff tariff;
  BatteryConfig battery;
  PvConfig pv;
  WindConfig wind;
  EquipmentBook equipment;
  DemandProfile demand_profile = default_profile(BsType::resident);
  std::optional<DemandTargets> demand_targets = reference_targets(BsType::resident);
  std::size_t calibration_days = 30;
  /// false: grid-only reference (no generation, no battery, no equipment cost).
  bool equipment_installed = true;
  EnvOptions env;
  TraceFiles traces;
  std::uint64_t rng_seed = 42;
};

/// Returns `cfg` unchanged when every invariant holds; throws ValidationError otherwise.
inline const ScenarioConfig& validate_scenario(const ScenarioConfig& cfg) {
  cfg.grid.validate();
  const std::size_t per_day = cfg.grid.slots_per_day();
  if (per_day == 0)
    throw ValidationError(ErrorKind::dimension_mismatch, "slot length must divide 24 h");
  if (cfg.weather_calendar.size() != (cfg.grid.slot_count + per_day - 1) / per_day)
    throw ValidationError(ErrorKind::dimension_mismatch,
                          "weather calendar covers " + std::to_string(cfg.weather_calendar.size()) +
                              " days but the grid spans " +
                              std::to_string(cfg.grid.duration_hours() / 24.0) + " days");
  cfg.tariff.validate();
  cfg.battery.validate();
  cfg.pv.validate();
  cfg.wind.validate();
  cfg.equipment.validate();
  cfg.demand_profile.validate();
  if (cfg.demand_targets) {
    if (!(cfg.demand_targets->mean_kw > 0.0 && cfg.demand_targets->peak_kw > 0.0))
      throw ValidationError(ErrorKind::nonpositive_value, "demand targets must be > 0");
    if (cfg.demand_targets->peak_kw < cfg.demand_targets->mean_kw)
      throw ValidationError(ErrorKind::bounds_inverted, "demand target peak must be >= mean");
  }
  if (cfg.env.action_levels < 3 || cfg.env.action_levels % 2 == 0)
    throw ValidationError(ErrorKind::out_of_range, "action_levels must be odd and >= 3");
  return cfg;
}

// --- built-in 30-day calendars ---------------------------------------------
// Codes: solar C(lear) P(artial cloudy) O(vercast, cloudy); wind H/M/L.

inline std::vector<WeatherDayClass> parse_calendar_codes(const std::string& codes) {
  std::vector<WeatherDayClass> out;
  std::istringstream is(codes);
  std::string tok;
  while (is >> tok) {
    if (tok.size() != 2) throw ValidationError(ErrorKind::malformed_input, "bad calendar code '" + tok + "'");
    WeatherDayClass c;
    switch (tok[0]) {
      case 'C': c.solar = SolarClass::clear; break;
      case 'P': c.solar = SolarClass::partial_cloudy; break;
      case 'O': c.solar = SolarClass::cloudy; break;
      default: throw ValidationError(ErrorKind::malformed_input, "bad solar code '" + tok + "'");
    }
    switch (tok[1]) {
      case 'H': c.wind = WindClass::high; break;
      case 'M': c.wind = WindClass::middle; break;
      case 'L': c.wind = WindClass::low; break;
      default: throw ValidationError(ErrorKind::malformed_input, "bad wind code '" + tok + "'");
    }
    out.push_back(c);
  }
  return out;
}

/// beijing: 16 clear / 9 partial / 5 cloudy, 10 high / 12 middle / 8 low wind.
/// shanghai: 8 / 12 / 10 solar, 18 / 6 / 6 wind (rainy, windy season).
/// guangzhou: 6 / 10 / 14 solar, 6 / 10 / 14 wind.
inline std::vector<WeatherDayClass> city_calendar(const std::string& city) {
  if (city == "beijing")
    return parse_calendar_codes(
        "OL PM CH CH PH CH CL OL CL PH CM OL PM CH CH PM PM CM CH PM CL CM CH CM CM PL OM OM PL CH");
  if (city == "shanghai")
    return parse_calendar_codes(
        "CM OH PL PH CH OH CH CM PH PH OM OL PL PH PH PH OM OL CM PH PM PH OL CH PH OH CH CH OH OL");
  if (city == "guangzhou")
    return parse_calendar_codes(
        "OM OH PM PM PL CL CL OH PM PL PL OL OL OL CL OM PL OM CM OM CM OH OM PH OL PL CH OH OL PL");
  throw ValidationError(ErrorKind::unknown_name, "unknown city calendar '" + city + "'");
}

inline const std::vector<std::string>& builtin_cities() {
  static const std::vector<std::string> names{"beijing", "shanghai", "guangzhou"};
  return names;
}

/// Calendar CSV: header `day,solar_class,wind_class`, one row per day.
inline std::vector<WeatherDayClass> read_calendar_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError(ErrorKind::malformed_input, "empty calendar file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "day,solar_class,wind_class")
    throw ValidationError(ErrorKind::malformed_input, "calendar header must be 'day,solar_class,wind_class'");
  std::vector<WeatherDayClass> out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string day, solar, wind;
    if (!std::getline(row, day, ',') || !std::getline(row, solar, ',') || !std::getline(row, wind))
      throw ValidationError(ErrorKind::malformed_input, "bad calendar row: " + line);
    if (parse_double(day) != static_cast<double>(out.size()))
      throw ValidationError(ErrorKind::malformed_input, "calendar days must run 0..n-1");
    out.push_back({solar_class_from_string(solar), wind_class_from_string(wind)});
  }
  return out;
}

inline std::vector<WeatherDayClass> read_calendar_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError(ErrorKind::malformed_input, "cannot open calendar file " + path);
  return read_calendar_csv(is);
}

inline void write_calendar_csv(std::ostream& os, const std::vector<WeatherDayClass>& cal) {
  os << "day,solar_class,wind_class\n";
  for (std::size_t i = 0; i < cal.size(); ++i) os << i << ',' << to_string(cal[i].solar) << ',' << to_string(cal[i].wind) << '\n';
}

// --- scenario construction ---------------------------------------------------

/// Default configuration for a BS type on a calendar; grid spans the calendar.
inline ScenarioConfig make_scenario(BsType type, std::vector<WeatherDayClass> calendar, std::string city = "custom",
                                    std::uint64_t seed = 42) {
  ScenarioConfig cfg;
  cfg.bs_type = type;
  cfg.city = std::move(city);
  cfg.name = std::string(to_string(type)) + "-" + cfg.city;
  cfg.weather_calendar = std::move(calendar);
  cfg.grid.slot_length_hours = 1.0;
  cfg.grid.slot_count = cfg.weather_calendar.size() * 24;
  cfg.demand_profile = default_profile(type);
  cfg.demand_targets = reference_targets(type);
  cfg.rng_seed = seed;
  return cfg;
}

inline ScenarioConfig make_city_scenario(BsType type, const std::string& city, std::uint64_t seed = 42) {
  return make_scenario(type, city_calendar(city), city, seed);
}

/// Same scenario with renewables and battery removed: the "no deployment" reference.
inline ScenarioConfig grid_only_variant(ScenarioConfig cfg) {
  cfg.equipment_installed = false;
  cfg.name += "-grid-only";
  return cfg;
}

// --- JSON ----------------------------------------------------------------------

using nlohmann::json;

inline json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = 1;
  j["name"] = c.name;
  j["city"] = c.city;
  j["bs_type"] = to_string(c.bs_type);
  j["rng_seed"] = c.rng_seed;
  j["equipment_installed"] = c.equipment_installed;
  j["grid"] = {{"slot_length_hours", c.grid.slot_length_hours},
               {"slot_count", c.grid.slot_count},
               {"cycle_start", c.grid.cycle_start}};
  json cal = json::array();
  for (const auto& d : c.weather_calendar) cal.push_back({{"solar", to_string(d.solar)}, {"wind", to_string(d.wind)}});
  j["weather_calendar"] = cal;
  const auto& w = c.weather;
  j["weather"] = {{"ghi_peak_clear", w.ghi_peak_clear},       {"cloudy_scale", w.cloudy_scale},
                  {"partial_dip_min", w.partial_dip_min},     {"sunrise_hour", w.sunrise_hour},
                  {"sunset_hour", w.sunset_hour},             {"wind_mean_ms", w.wind_mean_ms},
                  {"wind_noise_ms", w.wind_noise_ms},         {"temp_mean_c", w.temp_mean_c},
                  {"temp_amplitude_c", w.temp_amplitude_c},   {"temp_peak_hour", w.temp_peak_hour}};
  j["tariff"] = {{"energy_price", c.tariff.energy_price}, {"demand_price", c.tariff.demand_price}};
  const auto& b = c.battery;
  json table = json::array();
  for (const auto& p : b.cycle_table) table.push_back({p.dod, p.cycles});
  j["battery"] = {{"capacity_kwh", b.capacity_kwh},         {"soc_min", b.soc_min},
                  {"soc_max", b.soc_max},                   {"soe_ineffective", b.soe_ineffective},
                  {"eta_charge", b.eta_charge},             {"eta_discharge", b.eta_discharge},
                  {"max_charge_kw", b.max_charge_kw},       {"max_discharge_kw", b.max_discharge_kw},
                  {"unit_cost_per_kwh", b.unit_cost_per_kwh}, {"initial_soc", b.initial_soc},
                  {"cycle_table", table}};
  j["pv"] = {{"rating_kw", c.pv.rating_kw},
             {"ghi_stc", c.pv.ghi_stc},
             {"temp_coeff", c.pv.temp_coeff},
             {"cell_temp_gain", c.pv.cell_temp_gain}};
  j["wind"] = {{"rating_kw", c.wind.rating_kw},       {"cut_in_ms", c.wind.cut_in_ms},
               {"rated_ms", c.wind.rated_ms},         {"cut_out_ms", c.wind.cut_out_ms},
               {"hub_height_m", c.wind.hub_height_m}, {"ref_height_m", c.wind.ref_height_m},
               {"shear_exponent", c.wind.shear_exponent}};
  const auto& e = c.equipment;
  j["equipment"] = {{"pv_price", e.pv_price},
                    {"pv_lifetime_hours", e.pv_lifetime_hours},
                    {"wind_price", e.wind_price},
                    {"wind_lifetime_hours", e.wind_lifetime_hours},
                    {"pv_remaining", e.pv_remaining},
                    {"wind_remaining", e.wind_remaining}};
  const auto& d = c.demand_profile;
  j["demand"] = {{"base_kw", d.base_kw},
                 {"peak_kw", d.peak_kw},
                 {"weekday_shape", d.weekday_shape},
                 {"weekend_shape", d.weekend_shape},
                 {"noise_fraction", d.noise_fraction},
                 {"calibration_days", c.calibration_days}};
  if (c.demand_targets)
    j["demand"]["targets"] = {{"mean_kw", c.demand_targets->mean_kw}, {"peak_kw", c.demand_targets->peak_kw}};
  j["environment"] = {{"action_levels", c.env.action_levels},
                      {"reward", c.env.reward == RewardMode::exponential ? "exponential" : "linear"},
                      {"cap_discharge_at_deficit", c.env.cap_discharge_at_deficit}};
  json traces = json::object();
  if (!c.traces.demand.empty()) traces["demand"] = c.traces.demand;
  if (!c.traces.ghi.empty()) traces["ghi"] = c.traces.ghi;
  if (!c.traces.temperature.empty()) traces["temperature"] = c.traces.temperature;
  if (!c.traces.wind_speed.empty()) traces["wind_speed"] = c.traces.wind_speed;
  j["traces"] = traces;
  return j;
}

namespace detail {
template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
}  // namespace detail

/// Missing keys keep their defaults, so a minimal file only needs `bs_type`
/// and a calendar (or `city`).
inline ScenarioConfig scenario_from_json(const json& j) {
  using detail::read_opt;
  try {
    ScenarioConfig c;
    if (j.contains("bs_type")) {
      c.bs_type = bs_type_from_string(j.at("bs_type").get<std::string>());
      c.demand_profile = default_profile(c.bs_type);
      c.demand_targets = reference_targets(c.bs_type);
    }
    read_opt(j, "name", c.name);
    read_opt(j, "city", c.city);
    read_opt(j, "rng_seed", c.rng_seed);
    read_opt(j, "equipment_installed", c.equipment_installed);
    if (j.contains("weather_calendar")) {
      for (const auto& d : j.at("weather_calendar"))
        c.weather_calendar.push_back({solar_class_from_string(d.at("solar").get<std::string>()),
                                      wind_class_from_string(d.at("wind").get<std::string>())});
    } else if (j.contains("city")) {
      c.weather_calendar = city_calendar(c.city);
    }
    c.grid.slot_count = c.weather_calendar.size() * 24;
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      read_opt(g, "slot_length_hours", c.grid.slot_length_hours);
      read_opt(g, "slot_count", c.grid.slot_count);
      read_opt(g, "cycle_start", c.grid.cycle_start);
    }
    if (j.contains("weather")) {
      const auto& w = j.at("weather");
      read_opt(w, "ghi_peak_clear", c.weather.ghi_peak_clear);
      read_opt(w, "cloudy_scale", c.weather.cloudy_scale);
      read_opt(w, "partial_dip_min", c.weather.partial_dip_min);
      read_opt(w, "sunrise_hour", c.weather.sunrise_hour);
      read_opt(w, "sunset_hour", c.weather.sunset_hour);
      read_opt(w, "wind_mean_ms", c.weather.wind_mean_ms);
      read_opt(w, "wind_noise_ms", c.weather.wind_noise_ms);
      read_opt(w, "temp_mean_c", c.weather.temp_mean_c);
      read_opt(w, "temp_amplitude_c", c.weather.temp_amplitude_c);
      read_opt(w, "temp_peak_hour", c.weather.temp_peak_hour);
    }
    if (j.contains("tariff")) {
      read_opt(j.at("tariff"), "energy_price", c.tariff.energy_price);
      read_opt(j.at("tariff"), "demand_price", c.tariff.demand_price);
    }
    if (j.contains("battery")) {
      const auto& b = j.at("battery");
      read_opt(b, "capacity_kwh", c.battery.capacity_kwh);
      read_opt(b, "soc_min", c.battery.soc_min);
      read_opt(b, "soc_max", c.battery.soc_max);
      read_opt(b, "soe_ineffective", c.battery.soe_ineffective);
      read_opt(b, "eta_charge", c.battery.eta_charge);
      read_opt(b, "eta_discharge", c.battery.eta_discharge);
      read_opt(b, "max_charge_kw", c.battery.max_charge_kw);
      read_opt(b, "max_discharge_kw", c.battery.max_discharge_kw);
      read_opt(b, "unit_cost_per_kwh", c.battery.unit_cost_per_kwh);
      read_opt(b, "initial_soc", c.battery.initial_soc);
      if (b.contains("cycle_table")) {
        c.battery.cycle_table.clear();
        for (const auto& p : b.at("cycle_table"))
          c.battery.cycle_table.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
    }
    if (j.contains("pv")) {
      const auto& p = j.at("pv");
      read_opt(p, "rating_kw", c.pv.rating_kw);
      read_opt(p, "ghi_stc", c.pv.ghi_stc);
      read_opt(p, "temp_coeff", c.pv.temp_coeff);
      read_opt(p, "cell_temp_gain", c.pv.cell_temp_gain);
    }
    if (j.contains("wind")) {
      const auto& w = j.at("wind");
      read_opt(w, "rating_kw", c.wind.rating_kw);
      read_opt(w, "cut_in_ms", c.wind.cut_in_ms);
      read_opt(w, "rated_ms", c.wind.rated_ms);
      read_opt(w, "cut_out_ms", c.wind.cut_out_ms);
      read_opt(w, "hub_height_m", c.wind.hub_height_m);
      read_opt(w, "ref_height_m", c.wind.ref_height_m);
      read_opt(w, "shear_exponent", c.wind.shear_exponent);
    }
    if (j.contains("equipment")) {
      const auto& e = j.at("equipment");
      read_opt(e, "pv_price", c.equipment.pv_price);
      read_opt(e, "pv_lifetime_hours", c.equipment.pv_lifetime_hours);
      read_opt(e, "wind_price", c.equipment.wind_price);
      read_opt(e, "wind_lifetime_hours", c.equipment.wind_lifetime_hours);
      c.equipment.pv_remaining = c.equipment.pv_lifetime_hours;
      c.equipment.wind_remaining = c.equipment.wind_lifetime_hours;
      read_opt(e, "pv_remaining", c.equipment.pv_remaining);
      read_opt(e, "wind_remaining", c.equipment.wind_remaining);
    }
    if (j.contains("demand")) {
      const auto& d = j.at("demand");
      read_opt(d, "base_kw", c.demand_profile.base_kw);
      read_opt(d, "peak_kw", c.demand_profile.peak_kw);
      read_opt(d, "weekday_shape", c.demand_profile.weekday_shape);
      read_opt(d, "weekend_shape", c.demand_profile.weekend_shape);
      read_opt(d, "noise_fraction", c.demand_profile.noise_fraction);
      read_opt(d, "calibration_days", c.calibration_days);
      if (d.contains("targets")) {
        if (d.at("targets").is_null()) {
          c.demand_targets.reset();
        } else {
          c.demand_targets = DemandTargets{d.at("targets").at("mean_kw").get<double>(),
                                           d.at("targets").at("peak_kw").get<double>()};
        }
      }
    }
    if (j.contains("environment")) {
      const auto& e = j.at("environment");
      read_opt(e, "action_levels", c.env.action_levels);
      read_opt(e, "cap_discharge_at_deficit", c.env.cap_discharge_at_deficit);
      if (e.contains("reward")) {
        const auto mode = e.at("reward").get<std::string>();
        if (mode == "exponential") c.env.reward = RewardMode::exponential;
        else if (mode == "linear") c.env.reward = RewardMode::linear;
        else throw ValidationError(ErrorKind::unknown_name, "unknown reward mode '" + mode + "'");
      }
    }
    if (j.contains("traces")) {
      const auto& t = j.at("traces");
      read_opt(t, "demand", c.traces.demand);
      read_opt(t, "ghi", c.traces.ghi);
      read_opt(t, "temperature", c.traces.temperature);
      read_opt(t, "wind_speed", c.traces.wind_speed);
    }
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(ErrorKind::malformed_input, std::string("scenario JSON: ") + e.what());
  }
}

struct LoadedScenario {
  ScenarioConfig config;
  std::filesystem::path base_dir;  // for resolving trace file paths
};

inline LoadedScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError(ErrorKind::malformed_input, "cannot open scenario " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ValidationError(ErrorKind::malformed_input, std::string("scenario JSON: ") + e.what());
  }
  LoadedScenario out{scenario_from_json(j), path.parent_path()};
  validate_scenario(out.config);
  return out;
}

inline void save_scenario(const std::filesystem::path& path, const ScenarioConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << scenario_to_json(cfg).dump(2) << '\n';
}

// --- traces --------------------------------------------------------------------

/// Every per-slot series the environment needs, generated once per scenario.
struct ScenarioData {
  TimeGrid grid;
  Trace demand;
  WeatherTraces weather;
  GenerationTraces generation;
};

inline ScenarioData build_scenario_data(const ScenarioConfig& cfg, const std::filesystem::path& base_dir = {}) {
  validate_scenario(cfg);
  const auto resolve = [&](const std::string& p) { return (base_dir / p).string(); };
  ScenarioData data;
  data.grid = cfg.grid;

  if (!cfg.traces.demand.empty()) {
    data.demand = read_trace_csv(resolve(cfg.traces.demand), cfg.grid, TraceKind::demand);
  } else if (cfg.demand_targets) {
    data.demand = calibrated_demand(cfg.demand_profile, *cfg.demand_targets, cfg.grid, cfg.rng_seed,
                                    cfg.calibration_days);
  } else {
    data.demand = synth_demand(cfg.demand_profile, cfg.grid, cfg.rng_seed);
  }

  data.weather = synth_weather(cfg.weather_calendar, cfg.grid, cfg.rng_seed, cfg.weather);
  if (!cfg.traces.ghi.empty()) data.weather.ghi = read_trace_csv(resolve(cfg.traces.ghi), cfg.grid, TraceKind::ghi);
  if (!cfg.traces.temperature.empty())
    data.weather.temperature = read_trace_csv(resolve(cfg.traces.temperature), cfg.grid, TraceKind::temperature);
  if (!cfg.traces.wind_speed.empty())
    data.weather.wind_speed = read_trace_csv(resolve(cfg.traces.wind_speed), cfg.grid, TraceKind::wind_speed);

  if (cfg.equipment_installed) {
    data.generation = generation_trace(data.weather, cfg.pv, cfg.wind);
  } else {
    const std::vector<double> zeros(cfg.grid.slot_count, 0.0);
    data.generation = {Trace(cfg.grid, zeros, TraceKind::generation), Trace(cfg.grid, zeros, TraceKind::generation),
                       Trace(cfg.grid, zeros, TraceKind::generation)};
  }
  return data;
}

}  // namespace bess
