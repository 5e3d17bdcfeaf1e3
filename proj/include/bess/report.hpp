// Cost reports, table rows, ROI matrix, stacked-supply plot data and run
// manifests with SHA-256 checksums.
#pragma once

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "billing.hpp"
#include "core.hpp"
#include "environment.hpp"
#include "scenario.hpp"

namespace bess {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::string sha256_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (is) {
    is.read(buf, sizeof(buf));
    if (is.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(is.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Record of one CLI invocation. Every emitted file is listed with its checksum.
struct RunManifest {
  std::string command;
  std::string scenario_path;
  std::uint64_t seed = 0;
  std::string policy;
  std::string output_dir;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> artifacts;  // file names relative to output_dir

  void write() const {
    json j;
    j["command"] = command;
    j["scenario"] = scenario_path;
    j["seed"] = seed;
    j["policy"] = policy;
    j["output_dir"] = output_dir;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    json files = json::array();
    for (const auto& a : artifacts) files.push_back({{"file", a}, {"sha256", sha256_file(fs::path(output_dir) / a)}});
    j["artifacts"] = files;
    std::ofstream os(fs::path(output_dir) / "manifest.json");
    if (!os) throw std::runtime_error("cannot write manifest in " + output_dir);
    os << j.dump(2) << '\n';
  }
};

/// Savings are measured on the operating bill (energy + demand + battery wear)
/// against the full no-deployment bill.
struct EvaluationSummary {
  std::string label;
  std::string bs_type;
  std::string city;
  std::string policy;
  CostBreakdown costs;
  CostBreakdown baseline;

  double saving() const { return baseline.total() - costs.operating(); }
  double saving_ratio() const { return baseline.total() > 0.0 ? saving() / baseline.total() : 0.0; }
};

inline json cost_breakdown_json(const CostBreakdown& c) {
  return {{"energy", c.energy},
          {"demand", c.demand},
          {"investment", c.investment()},
          {"investment_pv", c.investment_pv},
          {"investment_wind", c.investment_wind},
          {"investment_battery", c.investment_battery},
          {"total", c.total()},
          {"operating", c.operating()},
          {"peak_kw", c.peak_kw}};
}

inline CostBreakdown cost_breakdown_from_json(const json& j) {
  CostBreakdown c;
  c.energy = j.at("energy").get<double>();
  c.demand = j.at("demand").get<double>();
  c.investment_pv = j.at("investment_pv").get<double>();
  c.investment_wind = j.at("investment_wind").get<double>();
  c.investment_battery = j.at("investment_battery").get<double>();
  c.peak_kw = j.at("peak_kw").get<double>();
  return c;
}

inline json cost_report_json(const EvaluationSummary& s, const ScenarioConfig& cfg) {
  json j;
  j["label"] = s.label;
  j["bs_type"] = s.bs_type;
  j["city"] = s.city;
  j["policy"] = s.policy;
  j["costs"] = cost_breakdown_json(s.costs);
  j["baseline"] = cost_breakdown_json(s.baseline);
  j["saving"] = s.saving();
  j["saving_ratio"] = s.saving_ratio();
  j["roi"] = roi(s.saving(), cfg.equipment, cfg.battery);
  j["investment_total"] = total_investment(cfg.equipment, cfg.battery);
  j["tariff"] = {{"energy_price", cfg.tariff.energy_price}, {"demand_price", cfg.tariff.demand_price}};
  j["slot_length_hours"] = cfg.grid.slot_length_hours;
  json cal = json::array();
  for (const auto& d : cfg.weather_calendar) cal.push_back({{"solar", to_string(d.solar)}, {"wind", to_string(d.wind)}});
  j["weather_calendar"] = cal;
  return j;
}

inline const char* table_row_header() {
  return "label,energy,demand,investment,saving,ratio,investment_pv,investment_wind,investment_battery,total,operating,"
         "peak_kw";
}

/// Columns follow the results-table order: energy, demand, investment, saving, ratio.
inline std::string table_row_csv(const EvaluationSummary& s) {
  std::ostringstream os;
  os << s.label;
  for (double v : {s.costs.energy, s.costs.demand, s.costs.investment(), s.saving(), s.saving_ratio(),
                   s.costs.investment_pv, s.costs.investment_wind, s.costs.investment_battery, s.costs.total(),
                   s.costs.operating(), s.costs.peak_kw})
    os << ',' << format_double(v);
  return os.str();
}

// --- plot data -------------------------------------------------------------------

struct SupplyPoint {
  std::size_t day;
  double hour;
  double demand;
  double renewable_direct;
  double battery_discharge;
  double grid;
};

/// Splits each slot's demand into renewable-direct, battery and grid parts.
inline std::vector<SupplyPoint> supply_decomposition(const std::vector<SlotReport>& slots, const TimeGrid& grid) {
  const std::size_t per_day = std::max<std::size_t>(1, grid.slots_per_day());
  std::vector<SupplyPoint> out;
  out.reserve(slots.size());
  for (const auto& r : slots)
    out.push_back({r.slot / per_day, grid.hour_of_day(r.slot), r.demand_kw, r.renewable_direct_kw,
                   r.battery_supply_kw, r.p_kw});
  return out;
}

/// Reads the per-slot CSV written by write_slot_reports_csv back into reports
/// and rebuilds the supply split from them.
inline std::vector<SlotReport> read_slot_reports_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError(ErrorKind::malformed_input, "cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  if (line.rfind("slot,d,g,b,tilde_b,p,", 0) != 0)
    throw ValidationError(ErrorKind::malformed_input, "unexpected slot report header in " + path.string());
  std::vector<SlotReport> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> f;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      auto next = line.find(',', pos);
      if (next == std::string::npos) next = line.size();
      f.push_back(parse_double(std::string_view(line).substr(pos, next - pos)));
      pos = next + 1;
    }
    if (f.size() != 15) throw ValidationError(ErrorKind::malformed_input, "slot report row has wrong arity");
    SlotReport r;
    r.slot = static_cast<std::size_t>(f[0]);
    r.demand_kw = f[1];
    r.generation_kw = f[2];
    r.b_kw = f[3];
    r.tilde_b_kw = f[4];
    r.p_kw = f[5];
    r.p_max_kw = f[6];
    r.soc = f[7];
    r.soe = f[8];
    r.dod = f[9];
    r.cost_energy = f[10];
    r.cost_demand = f[11];
    r.cost_pv = f[12];  // investment is stored aggregated
    r.reward = f[13];
    r.curtailed_kw = f[14];
    r.load_side_kw = r.b_kw > 0.0 ? r.tilde_b_kw : 0.0;
    r.battery_supply_kw = std::min(r.load_side_kw, r.demand_kw - r.p_kw);
    r.renewable_direct_kw = std::max(0.0, r.demand_kw - r.p_kw - r.battery_supply_kw);
    out.push_back(r);
  }
  return out;
}

inline void write_supply_csv(std::ostream& os, const std::vector<SupplyPoint>& pts,
                             const std::vector<WeatherDayClass>& calendar) {
  os << "day,solar_class,wind_class,hour,demand,renewable_direct,battery_discharge,grid\n";
  for (const auto& p : pts) {
    const auto cls = p.day < calendar.size() ? calendar[p.day] : WeatherDayClass{};
    os << p.day << ',' << to_string(cls.solar) << ',' << to_string(cls.wind) << ',' << format_double(p.hour);
    for (double v : {p.demand, p.renewable_direct, p.battery_discharge, p.grid}) os << ',' << format_double(v);
    os << '\n';
  }
}

/// Mean hourly decomposition per weather class (one day-profile per class).
inline void write_supply_by_class_csv(std::ostream& os, const std::vector<SupplyPoint>& pts,
                                      const std::vector<WeatherDayClass>& calendar) {
  struct Acc {
    double demand = 0, renewable = 0, battery = 0, grid = 0;
    std::size_t n = 0;
  };
  std::map<std::tuple<int, int, double>, Acc> acc;
  for (const auto& p : pts) {
    if (p.day >= calendar.size()) continue;
    auto& a = acc[{static_cast<int>(calendar[p.day].solar), static_cast<int>(calendar[p.day].wind), p.hour}];
    a.demand += p.demand;
    a.renewable += p.renewable_direct;
    a.battery += p.battery_discharge;
    a.grid += p.grid;
    ++a.n;
  }
  os << "solar_class,wind_class,hour,days,demand,renewable_direct,battery_discharge,grid\n";
  for (const auto& [key, a] : acc) {
    const auto n = static_cast<double>(a.n);
    os << to_string(static_cast<SolarClass>(std::get<0>(key))) << ',' << to_string(static_cast<WindClass>(std::get<1>(key)))
       << ',' << format_double(std::get<2>(key)) << ',' << a.n;
    for (double v : {a.demand / n, a.renewable / n, a.battery / n, a.grid / n}) os << ',' << format_double(v);
    os << '\n';
  }
}

}  // namespace bess
