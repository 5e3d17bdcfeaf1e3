#include <bess/bess.hpp>
#include <bess/commands.hpp>
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"

using namespace bess;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bess_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path small_scenario(const fs::path& dir, std::vector<WeatherDayClass> cal) {
  const auto base = dir / "base.json";
  save_scenario(base, make_scenario(BsType::resident, std::move(cal), "test"));
  ScenarioRequest req;
  req.base_config = base.string();
  req.out_dir = dir / "scenario";
  return cmd_scenario(req);
}

fs::path evaluate(const fs::path& scenario, PolicyKind k, const fs::path& out) {
  EvaluateRequest req;
  req.scenario = scenario;
  req.policy = k;
  req.out_dir = out;
  cmd_evaluate(req);
  return out;
}

}  // namespace

TEST(Sha256, KnownVectors) {
  const auto dir = scratch("sha");
  std::ofstream(dir / "abc") << "abc";
  std::ofstream(dir / "empty");
  EXPECT_EQ(sha256_file(dir / "abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_file(dir / "empty"), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Commands, CustomCalendarMustSpanOneCycle) {
  const auto dir = scratch("calendar");
  std::vector<WeatherDayClass> cal(30, {SolarClass::cloudy, WindClass::middle});
  {
    std::ofstream os(dir / "c30.csv");
    write_calendar_csv(os, cal);
  }
  cal.pop_back();
  {
    std::ofstream os(dir / "c29.csv");
    write_calendar_csv(os, cal);
  }
  ScenarioRequest req;
  req.calendar_file = (dir / "c30.csv").string();
  req.out_dir = dir / "ok";
  const auto loaded = load_scenario(cmd_scenario(req));
  EXPECT_EQ(loaded.config.weather_calendar.size(), 30u);
  EXPECT_EQ(loaded.config.grid.slot_count, 720u);
  req.calendar_file = (dir / "c29.csv").string();
  req.out_dir = dir / "bad";
  EXPECT_THROW(cmd_scenario(req), ValidationError);
}

TEST(Summary, TableRowAccountingIdentity) {
  EvaluationSummary s;
  s.label = "x";
  s.costs.energy = 4.7;
  s.costs.demand = 12.0;
  s.costs.investment_pv = 13.0;
  s.costs.investment_wind = 14.8;
  s.costs.investment_battery = 0.4;
  s.baseline.energy = 44.6;
  s.baseline.demand = 23.1;
  EXPECT_NEAR(s.saving(), 67.7 - 17.1, 1e-12);
  EXPECT_NEAR(s.saving_ratio(), 50.6 / 67.7, 1e-12);
  std::stringstream row(table_row_csv(s));
  std::vector<double> f;
  std::string cell;
  std::getline(row, cell, ',');
  while (std::getline(row, cell, ',')) f.push_back(std::stod(cell));
  ASSERT_EQ(f.size(), 11u);
  EXPECT_NEAR(f[0] + f[1] + f[2], f[8], 1e-9);
}

TEST(Commands, GridOnlySavingIsZeroAndRowSums) {
  const auto dir = scratch("gridonly");
  const auto sc = small_scenario(dir, {{SolarClass::partial_cloudy, WindClass::middle}});
  const auto run = evaluate(sc, PolicyKind::grid_only, dir / "run");
  json j;
  std::ifstream(run / "cost_report.json") >> j;
  EXPECT_EQ(j["saving"].get<double>(), 0.0);
  EXPECT_EQ(j["saving_ratio"].get<double>(), 0.0);
  const auto& c = j["costs"];
  EXPECT_NEAR(c["energy"].get<double>() + c["demand"].get<double>() + c["investment"].get<double>(),
              c["total"].get<double>(), 1e-9);
}

TEST(Commands, ManifestListsEveryFileWithChecksum) {
  const auto dir = scratch("manifest");
  const auto sc = small_scenario(dir, {{SolarClass::clear, WindClass::low}});
  const auto run = evaluate(sc, PolicyKind::greedy, dir / "run");
  json m;
  std::ifstream(run / "manifest.json") >> m;
  EXPECT_EQ(m["command"], "evaluate");
  EXPECT_EQ(m["policy"], "greedy");
  std::set<std::string> listed;
  for (const auto& a : m["artifacts"]) {
    listed.insert(a["file"].get<std::string>());
    EXPECT_EQ(a["sha256"].get<std::string>(), sha256_file(run / a["file"].get<std::string>()));
  }
  for (const auto& e : fs::directory_iterator(run)) {
    if (e.path().filename() != "manifest.json") {
      EXPECT_TRUE(listed.count(e.path().filename().string()));
    }
  }
}

TEST(Commands, EvaluateDqnNeedsCheckpoint) {
  const auto dir = scratch("nockpt");
  const auto sc = small_scenario(dir, {{SolarClass::clear, WindClass::low}});
  EvaluateRequest req;
  req.scenario = sc;
  req.policy = PolicyKind::dqn;
  req.out_dir = dir / "run";
  EXPECT_THROW(cmd_evaluate(req), ValidationError);
  req.checkpoint = dir / "missing.json";
  try {
    cmd_evaluate(req);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::missing_input);
  }
}

TEST(Commands, OracleRejectedAtFullScale) {
  const auto dir = scratch("oraclefull");
  const auto sc = small_scenario(dir, {{SolarClass::clear, WindClass::low}});
  EvaluateRequest req;
  req.scenario = sc;
  req.policy = PolicyKind::oracle;
  req.out_dir = dir / "run";
  EXPECT_THROW(cmd_evaluate(req), ValidationError);
}

TEST(Commands, SingleRunReport) {
  const auto dir = scratch("single");
  const auto sc = small_scenario(dir, {{SolarClass::cloudy, WindClass::low}});
  const auto run = evaluate(sc, PolicyKind::greedy, dir / "run");
  const auto rep = cmd_report({run}, dir / "report");
  ASSERT_EQ(rep.rows.size(), 1u);
  std::ifstream is(dir / "report" / "results_table.csv");
  int lines = 0;
  for (std::string l; std::getline(is, l);) ++lines;
  EXPECT_EQ(lines, 2);
  EXPECT_TRUE(fs::exists(dir / "report" / "roi_matrix.csv"));
  EXPECT_TRUE(fs::exists(dir / "report" / "supply_resident_test_greedy.csv"));
}

TEST(Commands, ReportRoiMatchesRoiOfSaving) {
  const auto dir = scratch("roi");
  const auto sc = small_scenario(dir, {{SolarClass::partial_cloudy, WindClass::high}, {SolarClass::cloudy, WindClass::low}});
  const auto run = evaluate(sc, PolicyKind::greedy, dir / "run");
  json j;
  std::ifstream(run / "cost_report.json") >> j;
  const double saving = j["saving"].get<double>();
  EXPECT_NEAR(j["roi"].get<double>(), 12.0 * saving / oracle::investment_total(), 1e-12);
  cmd_report({run}, dir / "report");
  std::ifstream is(dir / "report" / "roi_matrix.csv");
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_EQ(header, "bs_type,test");
  EXPECT_NEAR(std::stod(row.substr(row.find(',') + 1)), 12.0 * saving / oracle::investment_total(), 1e-9);
}

TEST(Commands, InconsistentTariffRejected) {
  const auto dir = scratch("tariff");
  const auto sc = small_scenario(dir, {{SolarClass::cloudy, WindClass::low}});
  const auto a = evaluate(sc, PolicyKind::greedy, dir / "a");
  auto loaded = load_scenario(sc);
  loaded.config.tariff.demand_price = 20.0;
  loaded.config.traces = {};
  const auto other = dir / "other.json";
  save_scenario(other, loaded.config);
  const auto b = evaluate(other, PolicyKind::greedy, dir / "b");
  try {
    cmd_report(std::vector<fs::path>{a, b}, dir / "report");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::inconsistent);
  }
}

TEST(Commands, ClearHighWindDayNeedsNoGrid) {
  const auto dir = scratch("zerogrid");
  const auto sc = small_scenario(dir, {{SolarClass::clear, WindClass::high}});
  const auto run = evaluate(sc, PolicyKind::greedy, dir / "run");
  const auto slots = read_slot_reports_csv(run / "slots.csv");
  ASSERT_EQ(slots.size(), 24u);
  for (const auto& s : slots) ASSERT_GE(s.generation_kw, s.demand_kw) << "slot " << s.slot;
  cmd_report({run}, dir / "report");
  std::ifstream is(dir / "report" / "supply_resident_test_greedy.csv");
  std::string line;
  std::getline(is, line);
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
  }
  EXPECT_EQ(rows, 24);
}

TEST(Commands, ReproducibleOutputs) {
  const auto dir = scratch("repro");
  std::vector<std::string> digests[2];
  for (int rep = 0; rep < 2; ++rep) {
    const auto sub = dir / std::to_string(rep);
    fs::create_directories(sub);
    const auto sc = small_scenario(sub, {{SolarClass::partial_cloudy, WindClass::low}});
    TrainRequest tr;
    tr.scenario = sc;
    tr.hp.episodes = 5;
    tr.seed = 9;
    tr.out_dir = sub / "train";
    const auto t = cmd_train(tr);
    EvaluateRequest ev;
    ev.scenario = sc;
    ev.policy = PolicyKind::dqn;
    ev.checkpoint = t.checkpoint;
    ev.out_dir = sub / "eval";
    cmd_evaluate(ev);
    for (const auto& f : {sub / "scenario" / "demand.csv", sub / "scenario" / "wind_speed.csv",
                          sub / "scenario" / "scenario.json", sub / "train" / "checkpoint.json",
                          sub / "train" / "training_log.csv", sub / "eval" / "cost_report.json",
                          sub / "eval" / "slots.csv"})
      digests[rep].push_back(sha256_file(f));
  }
  EXPECT_EQ(digests[0], digests[1]);
}
