// One-billing-cycle MDP around the battery, tariff and equipment models.
//
// State s(t) = [d(t), g(t), battery <SoE, SoC, DoD>, p_max]. Actions index a
// symmetric grid of fractions of the slot's feasible bound; charge levels are
// masked to idle on deficit slots and discharge levels on surplus slots, so
// every index is always legal.
#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "battery.hpp"
#include "billing.hpp"
#include "core.hpp"
#include "scenario.hpp"

namespace bess {

constexpr std::size_t kObservationSize = 8;
using Observation = std::vector<double>;

/// Levels -1, ..., 0, ..., +1 in K equal steps.
struct ActionGrid {
  std::vector<double> levels;

  explicit ActionGrid(std::size_t k = 9) {
    if (k < 3 || k % 2 == 0) throw ValidationError(ErrorKind::out_of_range, "action grid size must be odd and >= 3");
    levels.resize(k);
    const auto half = static_cast<double>((k - 1) / 2);
    for (std::size_t i = 0; i < k; ++i) levels[i] = (static_cast<double>(i) - half) / half;
  }
  std::size_t size() const { return levels.size(); }
  std::size_t idle_index() const { return (levels.size() - 1) / 2; }
  std::size_t max_charge_index() const { return 0; }
  std::size_t max_discharge_index() const { return levels.size() - 1; }
};

struct EnvState {
  std::size_t slot = 0;
  double demand_kw = 0.0;
  double generation_kw = 0.0;
  BatteryState battery;
  double p_max_kw = 0.0;
  EquipmentBook books;
  int battery_replacements = 0;
};

struct SlotReport {
  std::size_t slot = 0;
  double demand_kw = 0.0;
  double generation_kw = 0.0;
  double b_kw = 0.0;
  double tilde_b_kw = 0.0;  // load-side delivery on discharge, source-side draw (negative) on charge
  double load_side_kw = 0.0;
  double p_kw = 0.0;
  double p_max_kw = 0.0;
  double soc = 0.0;
  double soe = 0.0;
  double dod = 0.0;
  double cost_energy = 0.0;
  double cost_demand = 0.0;
  double cost_pv = 0.0;
  double cost_wind = 0.0;
  double cost_battery = 0.0;
  double reward = 0.0;
  double curtailed_kw = 0.0;
  double renewable_direct_kw = 0.0;
  double battery_supply_kw = 0.0;

  double cost_investment() const { return cost_pv + cost_wind + cost_battery; }
  double cost_total() const { return cost_energy + cost_demand + cost_investment(); }
};

/// Terminal-power b for action `idx` in `state`.
inline double decode_action(std::size_t idx, const EnvState& state, const ScenarioConfig& cfg,
                            const ActionGrid& grid) {
  if (idx >= grid.size()) throw std::out_of_range("action index out of range");
  if (!cfg.equipment_installed) return 0.0;
  const double level = grid.levels[idx];
  if (level == 0.0) return 0.0;
  const double surplus = state.generation_kw - state.demand_kw;
  const auto bounds = feasible_bounds(state.battery, surplus, cfg.battery, cfg.grid.slot_length_hours);
  if (surplus >= 0.0) return level < 0.0 ? -level * bounds.b_min : 0.0;
  if (level < 0.0) return 0.0;
  double upper = bounds.b_max;
  if (cfg.env.cap_discharge_at_deficit) upper = std::min(upper, -surplus / cfg.battery.eta_discharge);
  return level * upper;
}

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  double cost = 0.0;
  SlotReport report;
};

class Environment {
 public:
  Environment(std::shared_ptr<const ScenarioConfig> cfg, std::shared_ptr<const ScenarioData> data)
      : cfg_(std::move(cfg)), data_(std::move(data)), actions_(cfg_->env.action_levels) {
    validate_scenario(*cfg_);
    demand_scale_ = positive_max(data_->demand.values);
    generation_scale_ = positive_max(data_->generation.total.values);
    reset();
  }

  explicit Environment(const ScenarioConfig& cfg, const std::filesystem::path& base_dir = {})
      : Environment(std::make_shared<const ScenarioConfig>(cfg),
                    std::make_shared<const ScenarioData>(build_scenario_data(cfg, base_dir))) {}

  const EnvState& reset() {
    state_ = EnvState{};
    state_.battery = BatteryState{1.0, cfg_->battery.initial_soc, 0.0};
    state_.books = cfg_->equipment;
    costs_ = CostBreakdown{};
    load_slot();
    return state_;
  }

  Observation observe() const {
    const double hour = cfg_->grid.hour_of_day(std::min(state_.slot, horizon() - 1));
    const double angle = 2.0 * std::numbers::pi * hour / 24.0;
    return {state_.demand_kw / demand_scale_,
            state_.generation_kw / generation_scale_,
            state_.battery.soe,
            state_.battery.soc,
            state_.battery.dod,
            state_.p_max_kw / demand_scale_,
            std::sin(angle),
            std::cos(angle)};
  }

  double decode(std::size_t idx) const { return decode_action(idx, state_, *cfg_, actions_); }

  StepResult step(std::size_t action_idx) {
    if (done()) throw std::logic_error("step() called after the episode finished");
    const ScenarioConfig& cfg = *cfg_;
    const double dt = cfg.grid.slot_length_hours;
    const std::size_t t = state_.slot;
    const double d = state_.demand_kw;
    const double g = state_.generation_kw;
    const double surplus = g - d;

    const double b = decode(action_idx);
    auto op = apply_operation(state_.battery, b, cfg.battery, dt);
    if (op.dead) {
      op.next.soe = 1.0;
      op.next.dod = 0.0;
      ++state_.battery_replacements;
    }

    SlotReport r;
    r.slot = t;
    r.demand_kw = d;
    r.generation_kw = g;
    r.b_kw = b;
    r.load_side_kw = op.load_side_kw;
    r.tilde_b_kw = b > 0.0 ? op.load_side_kw : b / cfg.battery.eta_charge;
    r.p_kw = b > 0.0 ? std::max(0.0, d - g - op.load_side_kw) : std::max(0.0, d - g);
    r.curtailed_kw = surplus >= 0.0 ? std::max(0.0, g - d + b / cfg.battery.eta_charge) : 0.0;
    r.battery_supply_kw = std::min(op.load_side_kw, d - r.p_kw);
    r.renewable_direct_kw = std::max(0.0, d - r.p_kw - r.battery_supply_kw);

    r.cost_energy = energy_charge(r.p_kw, dt, cfg.tariff);
    const auto dem = demand_charge_step(r.p_kw, state_.p_max_kw, cfg.tariff);
    r.cost_demand = dem.charge;
    state_.p_max_kw = dem.new_p_max;

    if (cfg.equipment_installed) {
      auto pv = generator_use_cost(data_->generation.solar[t] > 0.0, Generator::pv, dt, state_.books);
      auto wind = generator_use_cost(data_->generation.wind[t] > 0.0, Generator::wind, dt, pv.book);
      state_.books = wind.book;
      r.cost_pv = pv.cost;
      r.cost_wind = wind.cost;
      r.cost_battery = battery_degradation_cost(op.delta_soe, cfg.battery);
    }

    const double slot_cost = r.cost_total();
    r.reward = cfg.env.reward == RewardMode::exponential ? std::exp(-slot_cost) : -slot_cost;

    state_.battery = op.next;
    r.p_max_kw = state_.p_max_kw;
    r.soc = state_.battery.soc;
    r.soe = state_.battery.soe;
    r.dod = state_.battery.dod;

    costs_.energy += r.cost_energy;
    costs_.demand += r.cost_demand;
    costs_.investment_pv += r.cost_pv;
    costs_.investment_wind += r.cost_wind;
    costs_.investment_battery += r.cost_battery;
    costs_.peak_kw = state_.p_max_kw;

    ++state_.slot;
    load_slot();
    return {observe(), r.reward, done(), slot_cost, r};
  }

  bool done() const { return state_.slot >= horizon(); }
  std::size_t horizon() const { return cfg_->grid.slot_count; }
  std::size_t action_count() const { return actions_.size(); }
  std::size_t observation_size() const { return kObservationSize; }

  const EnvState& state() const { return state_; }
  const CostBreakdown& costs() const { return costs_; }
  const ScenarioConfig& config() const { return *cfg_; }
  const ScenarioData& data() const { return *data_; }
  const ActionGrid& actions() const { return actions_; }
  std::shared_ptr<const ScenarioConfig> config_ptr() const { return cfg_; }
  std::shared_ptr<const ScenarioData> data_ptr() const { return data_; }

 private:
  static double positive_max(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m > 0.0 ? m : 1.0;
  }

  void load_slot() {
    if (done()) return;
    state_.demand_kw = data_->demand[state_.slot];
    state_.generation_kw = data_->generation.total[state_.slot];
  }

  std::shared_ptr<const ScenarioConfig> cfg_;
  std::shared_ptr<const ScenarioData> data_;
  ActionGrid actions_;
  EnvState state_;
  CostBreakdown costs_;
  double demand_scale_ = 1.0;
  double generation_scale_ = 1.0;
};

struct RolloutResult {
  CostBreakdown costs;
  std::vector<SlotReport> slots;
  double total_reward = 0.0;
  std::vector<std::size_t> actions;
};

/// Runs one full cycle from reset. `policy(obs, env)` returns an action index.
template <typename Policy>
RolloutResult rollout(Environment env, Policy&& policy) {
  env.reset();
  RolloutResult out;
  out.slots.reserve(env.horizon());
  while (!env.done()) {
    const std::size_t a = policy(env.observe(), std::as_const(env));
    auto res = env.step(a);
    out.total_reward += res.reward;
    out.actions.push_back(a);
    out.slots.push_back(std::move(res.report));
  }
  out.costs = env.costs();
  return out;
}

/// Per-slot CSV behind the stacked supply plots.
inline void write_slot_reports_csv(std::ostream& os, const std::vector<SlotReport>& slots) {
  os << "slot,d,g,b,tilde_b,p,p_max,soc,soe,dod,ce,cd,cu,reward,curtailed\n";
  for (const auto& r : slots) {
    os << r.slot;
    for (double v : {r.demand_kw, r.generation_kw, r.b_kw, r.tilde_b_kw, r.p_kw, r.p_max_kw, r.soc, r.soe, r.dod,
                     r.cost_energy, r.cost_demand, r.cost_investment(), r.reward, r.curtailed_kw})
      os << ',' << format_double(v);
    os << '\n';
  }
}

}  // namespace bess
