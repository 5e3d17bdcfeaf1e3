#include <bess/bess.hpp>
#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace bess;

namespace {

ScenarioConfig small_config(std::size_t levels = 5) {
  ScenarioConfig cfg;
  cfg.env.action_levels = levels;
  return cfg;
}

double replay_total(const Environment& tmpl, const std::vector<std::size_t>& seq) {
  Environment env = tmpl;
  env.reset();
  for (auto a : seq) env.step(a);
  return env.costs().total();
}

}  // namespace

TEST(GridOnly, AlwaysIdleAndNoDeploymentBill) {
  auto env = fixtures::make_env({1.0, 2.0, 1.5}, {3.0, 0.0, 0.0});
  const auto r = rollout(env, grid_only_policy);
  for (auto a : r.actions) EXPECT_EQ(a, env.actions().idle_index());
  for (const auto& s : r.slots) EXPECT_EQ(s.b_kw, 0.0);
}

TEST(Greedy, SurplusChargesAtMaximum) {
  auto env = fixtures::make_env({1.0}, {3.0});
  EXPECT_EQ(greedy_policy(env.observe(), env), env.actions().max_charge_index());
}

TEST(Greedy, DeficitTakesLargestFittingDischarge) {
  auto env = fixtures::make_env({1.0}, {0.0});
  const auto a = greedy_policy(env.observe(), env);
  EXPECT_GT(env.decode(a), 0.0);
  EXPECT_LE(0.85 * env.decode(a), 1.0 + 1e-12);
  EXPECT_EQ(a, env.actions().max_discharge_index());
}

TEST(Greedy, SmallDeficitWithoutCapStaysIdle) {
  ScenarioConfig cfg;
  cfg.env.cap_discharge_at_deficit = false;
  auto env = fixtures::make_env({0.1}, {0.0}, cfg);
  // smallest discharge level delivers 0.85 * 0.25 * 4 kW > 0.1 kW
  EXPECT_GT(0.85 * env.decode(env.actions().idle_index() + 1), 0.1);
  EXPECT_EQ(greedy_policy(env.observe(), env), env.actions().idle_index());
}

TEST(Greedy, EmptyBatteryStaysIdle) {
  auto env = fixtures::make_env({1.0}, {0.0}, {}, 0.1);
  EXPECT_EQ(env.decode(env.actions().max_discharge_index()), 0.0);
  EXPECT_EQ(greedy_policy(env.observe(), env), env.actions().idle_index());
}

TEST(Oracle, MatchesBruteForceOnRandomInstances) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dd(0.5, 2.0), gg(0.0, 2.5);
  for (int inst = 0; inst < 10; ++inst) {
    const std::size_t T = 3 + inst % 4;
    std::vector<double> d(T), g(T);
    for (std::size_t t = 0; t < T; ++t) {
      d[t] = dd(rng);
      g[t] = gg(rng);
    }
    const auto env = fixtures::make_env(d, g, small_config(), 0.6);
    const auto res = exhaustive_oracle(env);
    std::vector<std::size_t> arg;
    const double best = oracle::brute_force_min(T, 5, [&](const auto& s) { return replay_total(env, s); }, &arg);
    EXPECT_NEAR(res.min_total_cost, best, 1e-9) << "instance " << inst;
    EXPECT_NEAR(replay_total(env, res.actions), res.min_total_cost, 1e-12);
    EXPECT_EQ(res.actions, arg);
  }
}

TEST(Oracle, AllSurplusCostsOnlyInvestment) {
  const auto env = fixtures::make_env({1.0, 1.0, 1.0}, {2.0, 2.0, 2.0}, small_config());
  const auto res = exhaustive_oracle(env);
  EXPECT_EQ(res.costs.energy, 0.0);
  EXPECT_EQ(res.costs.demand, 0.0);
  EXPECT_EQ(res.costs.investment_battery, 0.0);
}

TEST(Oracle, SingleSlotPrefersDischarge) {
  const auto env = fixtures::make_env({2.0}, {0.0}, small_config(), 0.9);
  const auto res = exhaustive_oracle(env);
  EXPECT_EQ(res.actions.size(), 1u);
  EXPECT_GT(env.decode(res.actions[0]), 0.0);
  const double idle = replay_total(env, {env.actions().idle_index()});
  EXPECT_LT(res.min_total_cost, idle);
}

TEST(Oracle, GuardRejectsLargeSearch) {
  const auto env = fixtures::make_env(std::vector<double>(24, 1.0), std::vector<double>(24, 0.0), small_config());
  EXPECT_THROW(exhaustive_oracle(env), SearchSpaceError);
  const auto env9 = fixtures::make_env({1.0, 1.0}, {0.0, 0.0});
  EXPECT_THROW(exhaustive_oracle(env9), SearchSpaceError);
}

TEST(Oracle, WorkersGiveSameResult) {
  const auto env = fixtures::make_env({1.2, 0.4, 1.8, 1.1, 0.7, 1.5}, {0.3, 1.9, 0.0, 0.2, 1.4, 0.0}, small_config());
  OracleOptions par;
  par.workers = 4;
  const auto a = exhaustive_oracle(env);
  const auto b = exhaustive_oracle(env, par);
  EXPECT_EQ(a.min_total_cost, b.min_total_cost);
  EXPECT_EQ(a.actions, b.actions);
  EXPECT_EQ(a.leaves, b.leaves);
}

TEST(Oracle, NeverWorseThanGreedyOrGridOnly) {
  const auto env = fixtures::make_env({1.2, 0.4, 1.8, 1.1, 0.7, 1.5, 1.0}, {0.3, 1.9, 0.0, 0.2, 1.4, 0.0, 0.5},
                                      small_config());
  const auto o = exhaustive_oracle(env);
  EXPECT_LE(o.min_total_cost, rollout(env, greedy_policy).costs.total() + 1e-12);
  EXPECT_LE(o.min_total_cost, rollout(env, grid_only_policy).costs.total() + 1e-12);
}

TEST(SequencePolicy, ReplaysOracleActions) {
  const auto env = fixtures::make_env({1.0, 2.0, 0.5}, {0.0, 0.5, 2.0}, small_config());
  const auto o = exhaustive_oracle(env);
  const auto r = rollout(env, SequencePolicy{o.actions});
  EXPECT_EQ(r.actions, o.actions);
  EXPECT_DOUBLE_EQ(r.costs.total(), o.min_total_cost);
}

TEST(PolicyNames, RoundTrip) {
  for (auto k : {PolicyKind::grid_only, PolicyKind::greedy, PolicyKind::dqn, PolicyKind::oracle})
    EXPECT_EQ(policy_kind_from_string(to_string(k)), k);
  EXPECT_THROW(policy_kind_from_string("random"), ValidationError);
}
