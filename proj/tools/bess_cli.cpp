#include <bess/bess.hpp>
#include <bess/commands.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Globals {
  std::uint64_t seed = 42;
  std::string out = ".";
  std::string config;
};

std::string require_config(const Globals& g) {
  if (g.config.empty()) throw bess::ValidationError(bess::ErrorKind::missing_input, "--config <scenario.json> is required");
  return g.config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Battery scheduling for renewable-powered base stations"};
  app.require_subcommand(1);
  Globals g;
  bool seed_given = false;
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { g.seed = s; seed_given = true; }, "RNG seed (default 42)")
      ->configurable();
  app.add_option("--out", g.out, "output directory");
  app.add_option("--config", g.config, "scenario file (input for train/evaluate, base for scenario)");

  auto* sc = app.add_subcommand("scenario", "generate a scenario and its traces");
  std::string bs, city, calendar;
  sc->add_option("--bs", bs, "resident | office | comprehensive");
  sc->add_option("--city", city, "built-in calendar (beijing, shanghai, guangzhou) or label for --calendar");
  sc->add_option("--calendar", calendar, "custom calendar CSV (day,solar_class,wind_class)")->check(CLI::ExistingFile);

  auto* tr = app.add_subcommand("train", "train a DQN controller");
  bess::Hyperparams hp;
  bool no_select_best = false;
  tr->add_option("--episodes", hp.episodes);
  tr->add_option("--lr", hp.learning_rate);
  tr->add_option("--epsilon", hp.epsilon, "probability of the greedy action");
  tr->add_option("--epsilon-start", hp.epsilon_start);
  tr->add_option("--anneal-steps", hp.anneal_steps);
  tr->add_option("--gamma", hp.gamma);
  tr->add_option("--tau", hp.target_sync, "target sync period (steps)");
  tr->add_option("--kappa", hp.update_every, "update period (steps)");
  tr->add_option("--batch", hp.batch_size);
  tr->add_option("--capacity", hp.capacity);
  tr->add_option("--eval-every", hp.eval_every);
  tr->add_flag("--no-select-best", no_select_best, "keep the final weights instead of the best evaluated snapshot");

  auto* ev = app.add_subcommand("evaluate", "roll out a policy and write cost reports");
  std::string policy = "greedy", checkpoint;
  unsigned workers = 1;
  ev->add_option("--policy", policy, "grid_only | greedy | dqn | oracle");
  ev->add_option("--checkpoint", checkpoint, "network checkpoint for --policy dqn");
  ev->add_option("--workers", workers, "oracle threads");

  auto* rp = app.add_subcommand("report", "aggregate evaluation runs");
  std::vector<std::string> runs;
  rp->add_option("--runs,runs", runs, "evaluation output directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sc->parsed()) {
      bess::ScenarioRequest req;
      if (!g.config.empty()) req.base_config = g.config;
      if (!bs.empty()) req.bs_type = bess::bs_type_from_string(bs);
      if (!city.empty()) req.city = city;
      if (!calendar.empty()) req.calendar_file = calendar;
      if (seed_given) req.seed = g.seed;
      req.out_dir = g.out;
      std::cout << bess::cmd_scenario(req).string() << '\n';
    } else if (tr->parsed()) {
      hp.select_best = !no_select_best;
      bess::TrainRequest req{require_config(g), hp, g.seed, g.out};
      const auto out = bess::cmd_train(req);
      const auto& log = out.result.log;
      std::cout << "episodes " << log.size();
      if (!log.empty()) std::cout << ", last episode cost " << log.back().total_cost;
      std::cout << "\ncheckpoint " << out.checkpoint.string() << '\n';
    } else if (ev->parsed()) {
      bess::EvaluateRequest req;
      req.scenario = require_config(g);
      req.policy = bess::policy_kind_from_string(policy);
      if (!checkpoint.empty()) req.checkpoint = checkpoint;
      req.seed = g.seed;
      req.out_dir = g.out;
      req.oracle_workers = workers;
      const auto out = bess::cmd_evaluate(req);
      std::cout << bess::table_row_header() << '\n' << bess::table_row_csv(out.summary) << '\n';
    } else if (rp->parsed()) {
      std::vector<std::filesystem::path> dirs(runs.begin(), runs.end());
      const auto out = bess::cmd_report(dirs, g.out);
      std::cout << out.rows.size() << " rows, " << out.artifacts.size() << " files in " << g.out << '\n';
    }
  } catch (const bess::ValidationError& e) {
    std::cerr << "error [" << bess::to_string(e.kind()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
