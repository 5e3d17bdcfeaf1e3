// Two-part tariff accounting, equipment usage cost, battery degradation
// cost and return on investment.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "battery.hpp"
#include "core.hpp"

namespace bess {

struct Tariff {
  double energy_price = 0.049;  // $/kWh
  double demand_price = 16.08;  // $/kW of cycle peak

  void validate() const {
    if (!(energy_price > 0.0)) throw ValidationError(ErrorKind::nonpositive_value, "tariff.energy_price must be > 0");
    if (!(demand_price > 0.0)) throw ValidationError(ErrorKind::nonpositive_value, "tariff.demand_price must be > 0");
  }
  friend bool operator==(const Tariff&, const Tariff&) = default;
};

constexpr double hours_per_year = 365.0 * 24.0;

/// Prices and lifetime bookkeeping for the renewable generators.
struct EquipmentBook {
  double pv_price = 3950.0;
  double pv_lifetime_hours = 25.0 * hours_per_year;
  double wind_price = 4500.0;
  double wind_lifetime_hours = 20.0 * hours_per_year;
  double pv_remaining = 25.0 * hours_per_year;
  double wind_remaining = 20.0 * hours_per_year;
  int pv_replacements = 0;
  int wind_replacements = 0;

  void validate() const {
    if (!(pv_price > 0.0 && wind_price > 0.0))
      throw ValidationError(ErrorKind::nonpositive_value, "equipment prices must be > 0");
    if (!(pv_lifetime_hours > 0.0 && wind_lifetime_hours > 0.0))
      throw ValidationError(ErrorKind::nonpositive_value, "equipment lifetimes must be > 0");
    if (!(pv_remaining >= 0.0 && pv_remaining <= pv_lifetime_hours && wind_remaining >= 0.0 &&
          wind_remaining <= wind_lifetime_hours))
      throw ValidationError(ErrorKind::out_of_range, "remaining lifetime must lie in [0, lifetime]");
  }
};

enum class Generator { pv, wind };

struct CostBreakdown {
  double energy = 0.0;
  double demand = 0.0;
  double investment_pv = 0.0;
  double investment_wind = 0.0;
  double investment_battery = 0.0;
  double peak_kw = 0.0;

  double investment() const { return investment_pv + investment_wind + investment_battery; }
  double total() const { return energy + demand + investment(); }
  /// Bill excluding generator amortization (sunk equipment): energy, demand
  /// and battery wear. Basis for savings and policy comparisons.
  double operating() const { return energy + demand + investment_battery; }
};

inline double energy_charge(double p_kw, double dt_hours, const Tariff& tariff) {
  if (p_kw < 0.0) throw ValidationError(ErrorKind::out_of_range, "grid power must be >= 0");
  return tariff.energy_price * p_kw * dt_hours;
}

struct DemandStep {
  double charge;
  double new_p_max;
};

/// Incremental demand charge against the running cycle peak.
inline DemandStep demand_charge_step(double p_kw, double p_max, const Tariff& tariff) {
  return {tariff.demand_price * std::max(0.0, p_kw - p_max), std::max(p_kw, p_max)};
}

struct UseCost {
  double cost;
  EquipmentBook book;
  bool replaced;
};

/// Linear-wear usage cost of one generator for one slot. When the remaining
/// lifetime is exhausted the unit is replaced (remaining reset to lifetime)
/// and `replaced` is set.
inline UseCost generator_use_cost(bool using_now, Generator which, double dt_hours, EquipmentBook book) {
  if (!using_now) return {0.0, book, false};
  const bool pv = which == Generator::pv;
  const double price = pv ? book.pv_price : book.wind_price;
  const double life = pv ? book.pv_lifetime_hours : book.wind_lifetime_hours;
  double& remaining = pv ? book.pv_remaining : book.wind_remaining;
  const double cost = price * dt_hours / life;
  remaining -= dt_hours;
  bool replaced = false;
  if (remaining <= 0.0) {
    remaining = life;
    ++(pv ? book.pv_replacements : book.wind_replacements);
    replaced = true;
  }
  return {cost, book, replaced};
}

/// Degradation priced against the pack's replacement value.
inline double battery_degradation_cost(double delta_soe, const BatteryConfig& cfg) {
  if (delta_soe < 0.0) throw ValidationError(ErrorKind::out_of_range, "delta_soe must be >= 0");
  return cfg.replacement_cost() * delta_soe;
}

inline double total_investment(const EquipmentBook& book, const BatteryConfig& battery) {
  return book.pv_price + book.wind_price + battery.replacement_cost();
}

/// Annualized return: 12 * monthly saving / total equipment investment.
inline double roi(double monthly_saving, const EquipmentBook& book, const BatteryConfig& battery) {
  const double inv = total_investment(book, battery);
  if (!(inv > 0.0)) throw ValidationError(ErrorKind::nonpositive_value, "investment must be > 0");
  return 12.0 * monthly_saving / inv;
}

}  // namespace bess
