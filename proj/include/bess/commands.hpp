// The four CLI verbs as library calls: scenario, train, evaluate, report.
#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dqn.hpp"
#include "environment.hpp"
#include "policies.hpp"
#include "report.hpp"
#include "scenario.hpp"

namespace bess {

struct ScenarioRequest {
  std::optional<std::string> base_config;  // start from an existing scenario file
  std::optional<BsType> bs_type;
  std::optional<std::string> city;
  std::optional<std::string> calendar_file;
  std::optional<std::uint64_t> seed;
  fs::path out_dir = ".";
};

namespace detail {

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

inline void write_trace_file(const fs::path& dir, const std::string& name, const Trace& t,
                             std::vector<std::string>& artifacts) {
  auto os = open_out(dir / name);
  write_trace_csv(os, t);
  artifacts.push_back(name);
}

}  // namespace detail

/// Writes scenario.json plus demand/weather trace CSVs referenced from it.
/// Returns the scenario path.
inline fs::path cmd_scenario(const ScenarioRequest& req) {
  RunManifest m;
  m.command = "scenario";
  m.started_at = utc_timestamp();

  ScenarioConfig cfg;
  if (req.base_config) {
    auto loaded = load_scenario(*req.base_config);
    cfg = loaded.config;
    cfg.traces = {};
  }
  const BsType type = req.bs_type.value_or(cfg.bs_type);
  const std::uint64_t seed = req.seed.value_or(cfg.rng_seed);
  if (req.calendar_file) {
    auto cal = read_calendar_csv(*req.calendar_file);
    const std::size_t cycle_days = TimeGrid{}.slot_count / 24;
    if (cal.size() != cycle_days)
      throw ValidationError(ErrorKind::out_of_range, "calendar must list one billing cycle of " +
                                                         std::to_string(cycle_days) + " days, got " +
                                                         std::to_string(cal.size()));
    cfg = make_scenario(type, std::move(cal), req.city.value_or("custom"), seed);
  } else if (req.city) {
    cfg = make_city_scenario(type, *req.city, seed);
  } else if (!req.base_config) {
    cfg = make_city_scenario(type, "shanghai", seed);
  } else {
    cfg.bs_type = type;
    cfg.rng_seed = seed;
  }
  validate_scenario(cfg);

  fs::create_directories(req.out_dir);
  const auto data = build_scenario_data(cfg);
  detail::write_trace_file(req.out_dir, "demand.csv", data.demand, m.artifacts);
  detail::write_trace_file(req.out_dir, "ghi.csv", data.weather.ghi, m.artifacts);
  detail::write_trace_file(req.out_dir, "temperature.csv", data.weather.temperature, m.artifacts);
  detail::write_trace_file(req.out_dir, "wind_speed.csv", data.weather.wind_speed, m.artifacts);
  cfg.traces = {"demand.csv", "ghi.csv", "temperature.csv", "wind_speed.csv"};

  const fs::path path = req.out_dir / "scenario.json";
  save_scenario(path, cfg);
  m.artifacts.insert(m.artifacts.begin(), "scenario.json");
  m.scenario_path = path.string();
  m.seed = seed;
  m.output_dir = req.out_dir.string();
  m.finished_at = utc_timestamp();
  m.write();
  return path;
}

struct TrainRequest {
  fs::path scenario;
  Hyperparams hp;
  std::uint64_t seed = 42;
  fs::path out_dir = ".";
};

struct TrainOutcome {
  TrainResult result;
  fs::path checkpoint;
};

inline TrainOutcome cmd_train(const TrainRequest& req) {
  RunManifest m;
  m.command = "train";
  m.started_at = utc_timestamp();
  const auto loaded = load_scenario(req.scenario);
  Environment env(loaded.config, loaded.base_dir);

  TrainOutcome out{train(env, req.hp, req.seed), req.out_dir / "checkpoint.json"};
  fs::create_directories(req.out_dir);
  save_checkpoint(out.checkpoint.string(), out.result.net);
  {
    auto os = detail::open_out(req.out_dir / "training_log.csv");
    write_training_log_csv(os, out.result.log);
  }
  m.artifacts = {"checkpoint.json", "training_log.csv"};
  m.scenario_path = req.scenario.string();
  m.seed = req.seed;
  m.policy = "dqn";
  m.output_dir = req.out_dir.string();
  m.finished_at = utc_timestamp();
  m.write();
  return out;
}

struct EvaluateRequest {
  fs::path scenario;
  PolicyKind policy = PolicyKind::greedy;
  std::optional<fs::path> checkpoint;
  std::uint64_t seed = 42;
  fs::path out_dir = ".";
  unsigned oracle_workers = 1;
};

struct EvaluateOutcome {
  EvaluationSummary summary;
  RolloutResult rollout;
};

inline EvaluateOutcome cmd_evaluate(const EvaluateRequest& req) {
  RunManifest m;
  m.command = "evaluate";
  m.started_at = utc_timestamp();
  const auto loaded = load_scenario(req.scenario);
  const auto& cfg = loaded.config;
  Environment env(cfg, loaded.base_dir);
  Environment baseline_env(grid_only_variant(cfg), loaded.base_dir);

  EvaluateOutcome out;
  switch (req.policy) {
    case PolicyKind::grid_only:
      out.rollout = rollout(baseline_env, grid_only_policy);
      break;
    case PolicyKind::greedy:
      out.rollout = rollout(env, greedy_policy);
      break;
    case PolicyKind::dqn: {
      if (!req.checkpoint) throw ValidationError(ErrorKind::missing_input, "policy dqn needs --checkpoint");
      if (!fs::exists(*req.checkpoint))
        throw ValidationError(ErrorKind::missing_input, "checkpoint not found: " + req.checkpoint->string());
      const QNetwork net = load_checkpoint(req.checkpoint->string());
      if (net.input_size() != env.observation_size() || net.output_size() != env.action_count())
        throw ValidationError(ErrorKind::out_of_range, "checkpoint does not match the scenario's state/action sizes");
      out.rollout = rollout(env, DqnPolicy{&net});
      break;
    }
    case PolicyKind::oracle: {
      OracleOptions opt;
      opt.workers = req.oracle_workers;
      try {
        const auto best = exhaustive_oracle(env, opt);
        out.rollout = rollout(env, SequencePolicy{best.actions});
      } catch (const SearchSpaceError& e) {
        throw ValidationError(ErrorKind::out_of_range, e.what());
      }
      break;
    }
  }

  auto& s = out.summary;
  s.bs_type = to_string(cfg.bs_type);
  s.city = cfg.city;
  s.policy = to_string(req.policy);
  s.label = s.bs_type + "/" + s.city + "/" + s.policy;
  s.costs = out.rollout.costs;
  s.baseline = req.policy == PolicyKind::grid_only ? out.rollout.costs : rollout(baseline_env, grid_only_policy).costs;

  fs::create_directories(req.out_dir);
  {
    auto os = detail::open_out(req.out_dir / "cost_report.json");
    os << cost_report_json(s, cfg).dump(2) << '\n';
  }
  {
    auto os = detail::open_out(req.out_dir / "table_row.csv");
    os << table_row_header() << '\n' << table_row_csv(s) << '\n';
  }
  {
    auto os = detail::open_out(req.out_dir / "slots.csv");
    write_slot_reports_csv(os, out.rollout.slots);
  }
  m.artifacts = {"cost_report.json", "table_row.csv", "slots.csv"};
  m.scenario_path = req.scenario.string();
  m.seed = req.seed;
  m.policy = s.policy;
  m.output_dir = req.out_dir.string();
  m.finished_at = utc_timestamp();
  m.write();
  return out;
}

// --- report ----------------------------------------------------------------------

struct RunRecord {
  fs::path dir;
  json report;
  std::vector<SlotReport> slots;
};

inline RunRecord read_run(const fs::path& dir) {
  RunRecord r{dir, {}, {}};
  std::ifstream is(dir / "cost_report.json");
  if (!is) throw ValidationError(ErrorKind::missing_input, "no cost_report.json in " + dir.string());
  try {
    is >> r.report;
  } catch (const json::exception& e) {
    throw ValidationError(ErrorKind::malformed_input, dir.string() + ": " + e.what());
  }
  if (fs::exists(dir / "slots.csv")) r.slots = read_slot_reports_csv(dir / "slots.csv");
  return r;
}

inline EvaluationSummary summary_from_report(const json& j) {
  try {
    EvaluationSummary s;
    s.label = j.at("label").get<std::string>();
    s.bs_type = j.at("bs_type").get<std::string>();
    s.city = j.at("city").get<std::string>();
    s.policy = j.at("policy").get<std::string>();
    s.costs = cost_breakdown_from_json(j.at("costs"));
    s.baseline = cost_breakdown_from_json(j.at("baseline"));
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(ErrorKind::malformed_input, std::string("cost report: ") + e.what());
  }
}

inline std::vector<WeatherDayClass> calendar_from_report(const json& j) {
  std::vector<WeatherDayClass> cal;
  for (const auto& d : j.at("weather_calendar"))
    cal.push_back({solar_class_from_string(d.at("solar").get<std::string>()),
                   wind_class_from_string(d.at("wind").get<std::string>())});
  return cal;
}

struct ReportOutcome {
  std::vector<EvaluationSummary> rows;
  std::vector<std::string> artifacts;
};

/// Aggregates evaluation directories into results/ROI tables and plot data.
inline ReportOutcome cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out_dir) {
  if (run_dirs.empty()) throw ValidationError(ErrorKind::missing_input, "report needs at least one run directory");
  RunManifest m;
  m.command = "report";
  m.started_at = utc_timestamp();

  std::vector<std::future<RunRecord>> futs;
  for (const auto& d : run_dirs) futs.push_back(std::async(std::launch::async, read_run, d));
  std::vector<RunRecord> runs;
  for (auto& f : futs) runs.push_back(f.get());

  const json& tariff0 = runs.front().report.at("tariff");
  const double invest0 = runs.front().report.at("investment_total").get<double>();
  for (const auto& r : runs) {
    if (r.report.at("tariff") != tariff0)
      throw ValidationError(ErrorKind::inconsistent, "inconsistent tariffs across runs: " + r.dir.string());
    if (r.report.at("investment_total").get<double>() != invest0)
      throw ValidationError(ErrorKind::inconsistent, "inconsistent equipment prices across runs: " + r.dir.string());
  }

  ReportOutcome out;
  fs::create_directories(out_dir);
  {
    auto os = detail::open_out(out_dir / "results_table.csv");
    os << "bs_type,city,policy," << table_row_header() << ",roi\n";
    for (const auto& r : runs) {
      auto s = summary_from_report(r.report);
      const double roi_value = r.report.at("roi").get<double>();
      os << s.bs_type << ',' << s.city << ',' << s.policy << ',' << table_row_csv(s) << ',' << format_double(roi_value)
         << '\n';
      out.rows.push_back(std::move(s));
    }
  }
  out.artifacts.push_back("results_table.csv");

  // BS type x city matrices; when several policies exist for a cell the last run wins.
  std::set<std::string> cities;
  std::map<std::string, std::map<std::string, const EvaluationSummary*>> cell;
  for (const auto& s : out.rows) {
    if (s.policy == "grid_only") continue;
    cities.insert(s.city);
    cell[s.bs_type][s.city] = &s;
  }
  for (const auto& [name, ratio] : {std::pair{"roi_matrix.csv", false}, std::pair{"saving_matrix.csv", true}}) {
    auto os = detail::open_out(out_dir / name);
    os << "bs_type";
    for (const auto& c : cities) os << ',' << c;
    os << '\n';
    for (const auto& [bs, row] : cell) {
      os << bs;
      for (const auto& c : cities) {
        os << ',';
        auto it = row.find(c);
        if (it == row.end()) continue;
        os << format_double(ratio ? it->second->saving_ratio() : 12.0 * it->second->saving() / invest0);
      }
      os << '\n';
    }
    out.artifacts.push_back(name);
  }

  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].slots.empty()) continue;
    TimeGrid grid;
    grid.slot_length_hours = runs[i].report.value("slot_length_hours", 1.0);
    grid.slot_count = runs[i].slots.size();
    const auto cal = calendar_from_report(runs[i].report);
    const auto pts = supply_decomposition(runs[i].slots, grid);
    std::string stem = out.rows[i].label;
    for (auto& ch : stem)
      if (ch == '/') ch = '_';
    {
      const std::string name = "supply_" + stem + ".csv";
      auto os = detail::open_out(out_dir / name);
      write_supply_csv(os, pts, cal);
      out.artifacts.push_back(name);
    }
    {
      const std::string name = "supply_by_class_" + stem + ".csv";
      auto os = detail::open_out(out_dir / name);
      write_supply_by_class_csv(os, pts, cal);
      out.artifacts.push_back(name);
    }
  }

  m.artifacts = out.artifacts;
  m.output_dir = out_dir.string();
  m.finished_at = utc_timestamp();
  m.write();
  return out;
}

}  // namespace bess
