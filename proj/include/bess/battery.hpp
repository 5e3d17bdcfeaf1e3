// Battery state, feasibility limits, efficiency conversion and
// depth-of-discharge dependent degradation.
//
// Sign convention for the battery operation b (kW at the battery terminals):
// b > 0 discharges to the load, b < 0 charges from surplus renewables.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace bess {

struct CyclePoint {
  double dod;
  double cycles;
};

inline std::vector<CyclePoint> default_cycle_table() {
  return {{0.1, 15000}, {0.2, 9000}, {0.3, 6000}, {0.4, 4500}, {0.5, 3500},
          {0.6, 2800},  {0.7, 2300}, {0.8, 1900}, {0.9, 1600}, {1.0, 1400}};
}

struct BatteryConfig {
  double capacity_kwh = 10.0;
  double soc_min = 0.1;
  double soc_max = 1.0;
  double soe_ineffective = 0.8;
  double eta_charge = 0.999;
  double eta_discharge = 0.85;
  double max_charge_kw = 16.0;
  double max_discharge_kw = 8.0;
  std::vector<CyclePoint> cycle_table = default_cycle_table();
  double unit_cost_per_kwh = 271.0;
  double initial_soc = 0.5;

  /// Replacement value of the whole pack.
  double replacement_cost() const { return unit_cost_per_kwh * capacity_kwh; }

  void validate() const {
    if (!(capacity_kwh > 0.0))
      throw ValidationError(ErrorKind::nonpositive_value, "battery.capacity_kwh must be > 0");
    if (!(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0))
      throw ValidationError(ErrorKind::bounds_inverted, "battery needs 0 <= soc_min < soc_max <= 1");
    if (!(soe_ineffective > 0.0 && soe_ineffective < 1.0))
      throw ValidationError(ErrorKind::out_of_range, "battery.soe_ineffective must lie in (0,1)");
    if (!(eta_charge > 0.0 && eta_charge <= 1.0 && eta_discharge > 0.0 && eta_discharge <= 1.0))
      throw ValidationError(ErrorKind::out_of_range, "battery efficiencies must lie in (0,1]");
    if (!(max_charge_kw > 0.0 && max_discharge_kw > 0.0))
      throw ValidationError(ErrorKind::nonpositive_value, "battery rate limits must be > 0");
    if (!(unit_cost_per_kwh > 0.0))
      throw ValidationError(ErrorKind::nonpositive_value, "battery.unit_cost_per_kwh must be > 0");
    if (!(initial_soc >= soc_min && initial_soc <= soc_max))
      throw ValidationError(ErrorKind::out_of_range, "battery.initial_soc must lie in [soc_min, soc_max]");
    if (cycle_table.empty()) throw ValidationError(ErrorKind::malformed_input, "battery.cycle_table is empty");
    for (std::size_t i = 0; i < cycle_table.size(); ++i) {
      const auto& p = cycle_table[i];
      if (!(p.dod > 0.0 && p.dod <= 1.0 && p.cycles > 0.0))
        throw ValidationError(ErrorKind::out_of_range, "cycle_table entries need dod in (0,1] and cycles > 0");
      if (i > 0 && !(p.dod > cycle_table[i - 1].dod && p.cycles < cycle_table[i - 1].cycles))
        throw ValidationError(ErrorKind::malformed_input,
                              "cycle_table keys must increase strictly and values decrease strictly");
    }
  }
};

struct BatteryState {
  double soe = 1.0;
  double soc = 0.5;
  double dod = 0.0;
  friend bool operator==(const BatteryState&, const BatteryState&) = default;
};

/// Raised when an operation lies outside the slot's feasible bounds.
class BoundViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Piecewise-linear interpolation of the cycle table, clamped at both ends.
inline double cycle_life(double dod, const BatteryConfig& cfg) {
  if (!(dod > 0.0)) throw ValidationError(ErrorKind::out_of_range, "cycle_life needs dod > 0");
  const auto& t = cfg.cycle_table;
  if (dod <= t.front().dod) return t.front().cycles;
  if (dod >= t.back().dod) return t.back().cycles;
  auto hi = std::upper_bound(t.begin(), t.end(), dod, [](double x, const CyclePoint& p) { return x < p.dod; });
  auto lo = hi - 1;
  if (dod == lo->dod) return lo->cycles;
  const double w = (dod - lo->dod) / (hi->dod - lo->dod);
  return lo->cycles + w * (hi->cycles - lo->cycles);
}

struct OperationBounds {
  double b_min;  // <= 0, charge side
  double b_max;  // >= 0, discharge side
};

/// Charge-only on surplus slots, discharge-only on deficit slots.
/// `surplus_kw` = g - d.
inline OperationBounds feasible_bounds(const BatteryState& s, double surplus_kw, const BatteryConfig& cfg,
                                       double dt_hours) {
  const double pi = cfg.capacity_kwh;
  if (surplus_kw >= 0.0) {
    const double headroom = std::max(0.0, (cfg.soc_max - s.soc) * pi / dt_hours);
    const double charge = std::min({cfg.max_charge_kw, cfg.eta_charge * surplus_kw, headroom});
    return {-charge, 0.0};
  }
  const double available = std::max(0.0, (s.soc - cfg.soc_min) * pi / dt_hours);
  return {0.0, std::min(cfg.max_discharge_kw, available)};
}

struct OperationResult {
  BatteryState next;
  double load_side_kw = 0.0;  // power delivered to the load (discharge only)
  double delta_soe = 0.0;
  double delta_dod = 0.0;
  bool dead = false;  // soe fell below soe_ineffective: replacement due
};

/// Applies terminal power b for one slot. Callers are expected to pass b
/// within feasible_bounds; SoC outside [soc_min, soc_max] beyond rounding
/// raises BoundViolation.
inline OperationResult apply_operation(const BatteryState& s, double b_kw, const BatteryConfig& cfg,
                                       double dt_hours) {
  constexpr double tol = 1e-9;
  OperationResult r;
  r.next = s;
  if (b_kw == 0.0) return r;

  const double pi = cfg.capacity_kwh;
  const double dsoc = b_kw * dt_hours / pi;
  double soc = s.soc - dsoc;
  if (soc < cfg.soc_min - tol || soc > cfg.soc_max + tol)
    throw BoundViolation("battery operation " + std::to_string(b_kw) + " kW takes SoC to " + std::to_string(soc));
  r.next.soc = std::clamp(soc, cfg.soc_min, cfg.soc_max);

  if (b_kw > 0.0) {
    r.load_side_kw = cfg.eta_discharge * b_kw;
    r.delta_dod = dsoc;
    const double depth = std::min(1.0, s.dod + dsoc);
    r.delta_soe = (1.0 - cfg.soe_ineffective) / cycle_life(depth, cfg);
    r.next.dod = depth;
    r.next.soe = s.soe - r.delta_soe;
    r.dead = r.next.soe < cfg.soe_ineffective;
  } else {
    r.next.dod = std::max(0.0, s.dod + dsoc);  // dsoc < 0: depth refills
  }
  return r;
}

}  // namespace bess
