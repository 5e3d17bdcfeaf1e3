// Base-station power-demand archetypes and billing-total calibration.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "core.hpp"

namespace bess {

enum class BsType { resident, office, comprehensive };

inline const char* to_string(BsType t) {
  switch (t) {
    case BsType::resident: return "resident";
    case BsType::office: return "office";
    case BsType::comprehensive: return "comprehensive";
  }
  return "?";
}

inline BsType bs_type_from_string(const std::string& s) {
  if (s == "resident" || s == "I" || s == "type1") return BsType::resident;
  if (s == "office" || s == "II" || s == "type2") return BsType::office;
  if (s == "comprehensive" || s == "III" || s == "type3") return BsType::comprehensive;
  throw ValidationError(ErrorKind::unknown_name, "unknown BS type '" + s + "'");
}

using DayShape = std::array<double, 24>;

struct DemandProfile {
  BsType bs_type = BsType::resident;
  double base_kw = 1.0;
  double peak_kw = 1.45;
  DayShape weekday_shape{};
  DayShape weekend_shape{};
  double noise_fraction = 0.02;  // of peak_kw, uniform +-

  void validate() const {
    if (!(base_kw > 0.0 && base_kw <= peak_kw))
      throw ValidationError(ErrorKind::bounds_inverted, "demand profile needs 0 < base_kw <= peak_kw");
    // The weekly shape (weekday and weekend together) peaks at exactly 1.
    double mx = 0.0;
    for (const auto* shape : {&weekday_shape, &weekend_shape}) {
      for (double w : *shape) {
        if (w < 0.0 || w > 1.0) throw ValidationError(ErrorKind::out_of_range, "shape weights must lie in [0,1]");
        mx = std::max(mx, w);
      }
    }
    if (mx != 1.0) throw ValidationError(ErrorKind::out_of_range, "weekly shape must have max weight 1");
    if (noise_fraction < 0.0) throw ValidationError(ErrorKind::out_of_range, "noise_fraction must be >= 0");
  }
};

// Hand-authored hourly weights. Resident: evening peak, busy weekends.
// Office: weekday working hours, quiet weekends. Comprehensive: high from
// morning through late evening every day.
inline DemandProfile default_profile(BsType type) {
  DemandProfile p;
  p.bs_type = type;
  switch (type) {
    case BsType::resident:
      p.base_kw = 1.0;
      p.peak_kw = 1.45;
      p.weekday_shape = {0.35, 0.15, 0.05, 0.0, 0.0, 0.0, 0.1, 0.3, 0.4, 0.35, 0.3, 0.35,
                         0.4, 0.35, 0.3, 0.3, 0.4, 0.55, 0.75, 0.9, 1.0, 1.0, 0.85, 0.6};
      p.weekend_shape = {0.45, 0.25, 0.1, 0.0, 0.0, 0.0, 0.05, 0.2, 0.4, 0.55, 0.65, 0.7,
                         0.7, 0.65, 0.6, 0.6, 0.65, 0.75, 0.85, 0.95, 1.0, 1.0, 0.9, 0.7};
      break;
    case BsType::office:
      p.base_kw = 0.95;
      p.peak_kw = 1.3;
      p.weekday_shape = {0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05, 0.2, 0.55, 0.85, 0.95, 1.0,
                         0.9, 0.9, 1.0, 0.95, 0.9, 0.75, 0.5, 0.35, 0.25, 0.2, 0.15, 0.1};
      p.weekend_shape = {0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05, 0.1, 0.2, 0.3, 0.35, 0.4,
                         0.4, 0.4, 0.35, 0.35, 0.3, 0.3, 0.25, 0.25, 0.2, 0.15, 0.1, 0.05};
      break;
    case BsType::comprehensive:
      p.base_kw = 1.05;
      p.peak_kw = 1.42;
      p.weekday_shape = {0.3, 0.1, 0.0, 0.0, 0.0, 0.0, 0.15, 0.45, 0.75, 0.85, 0.9, 0.95,
                         0.95, 0.9, 0.9, 0.9, 0.9, 0.95, 1.0, 1.0, 1.0, 0.95, 0.8, 0.55};
      p.weekend_shape = {0.35, 0.15, 0.0, 0.0, 0.0, 0.0, 0.1, 0.35, 0.65, 0.8, 0.9, 0.95,
                         0.95, 0.95, 0.9, 0.9, 0.9, 0.95, 1.0, 1.0, 1.0, 0.95, 0.85, 0.6};
      break;
  }
  return p;
}

/// Day 0 of the cycle is a Monday; days 5 and 6 of each week are weekend days.
inline bool is_weekend(std::size_t day_index) { return day_index % 7 >= 5; }

/// Uncalibrated trace: base + (peak - base) * shape(hour, daytype) + noise,
/// clamped to [0, peak].
inline Trace synth_demand(const DemandProfile& profile, const TimeGrid& grid, std::uint64_t seed) {
  profile.validate();
  const std::size_t per_day = grid.slots_per_day();
  if (per_day == 0) throw ValidationError(ErrorKind::dimension_mismatch, "slot length must divide a day");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xd3u};
  std::mt19937_64 rng(seq);
  const double amp = profile.noise_fraction * profile.peak_kw;
  std::uniform_real_distribution<double> noise(-amp, amp);
  std::vector<double> v(grid.slot_count);
  for (std::size_t i = 0; i < grid.slot_count; ++i) {
    const std::size_t day = i / per_day;
    const auto hour = static_cast<std::size_t>(grid.hour_of_day(i));
    const DayShape& shape = is_weekend(day) ? profile.weekend_shape : profile.weekday_shape;
    const double n = amp > 0.0 ? noise(rng) : 0.0;
    v[i] = std::clamp(profile.base_kw + (profile.peak_kw - profile.base_kw) * shape[hour] + n, 0.0,
                      profile.peak_kw);
  }
  return Trace(grid, std::move(v), TraceKind::demand);
}

/// Affine rescale a*x + b with mean -> target_mean and max -> target_peak.
inline Trace calibrate_demand(const Trace& trace, double target_mean_kw, double target_peak_kw) {
  if (!(target_mean_kw > 0.0 && target_peak_kw > 0.0))
    throw ValidationError(ErrorKind::nonpositive_value, "calibration targets must be positive");
  if (target_peak_kw < target_mean_kw)
    throw ValidationError(ErrorKind::bounds_inverted, "target peak must be >= target mean");
  const auto& x = trace.values;
  if (x.empty()) throw ValidationError(ErrorKind::dimension_mismatch, "empty trace");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double mx = *std::max_element(x.begin(), x.end());
  if (!(mx > mean)) throw ValidationError(ErrorKind::malformed_input, "cannot calibrate a constant trace");
  const double a = (target_peak_kw - target_mean_kw) / (mx - mean);
  const double b = target_mean_kw - a * mean;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = a * x[i] + b;
    if (y[i] < 0.0)
      throw ValidationError(ErrorKind::out_of_range, "calibration targets infeasible: rescaled trace goes negative");
  }
  return Trace(trace.grid, std::move(y), trace.kind);
}

/// Mean / peak back-solved from the reference "no deployment" bills
/// (energy = 0.049 $/kWh * mean * 720 h, demand = 16.08 $/kW * peak).
struct DemandTargets {
  double mean_kw;
  double peak_kw;
};

inline DemandTargets reference_targets(BsType t) {
  constexpr double energy_per_kw = 0.049 * 720.0;
  constexpr double demand_price = 16.08;
  switch (t) {
    case BsType::resident: return {44.6 / energy_per_kw, 23.1 / demand_price};
    case BsType::office: return {40.1 / energy_per_kw, 20.2 / demand_price};
    case BsType::comprehensive: return {45.6 / energy_per_kw, 22.8 / demand_price};
  }
  return {1.0, 1.0};
}

/// Calibrated demand on `grid`: synthesizes `calibration_days` whole days
/// (at least enough to cover the grid), calibrates over that window, then
/// keeps the first grid.slot_count slots.
inline Trace calibrated_demand(const DemandProfile& profile, const DemandTargets& targets, const TimeGrid& grid,
                               std::uint64_t seed, std::size_t calibration_days = 30) {
  const std::size_t per_day = grid.slots_per_day();
  if (per_day == 0) throw ValidationError(ErrorKind::dimension_mismatch, "slot length must divide a day");
  const std::size_t grid_days = (grid.slot_count + per_day - 1) / per_day;
  TimeGrid window = grid;
  window.slot_count = std::max(calibration_days, grid_days) * per_day;
  Trace full = calibrate_demand(synth_demand(profile, window, seed), targets.mean_kw, targets.peak_kw);
  full.values.resize(grid.slot_count);
  full.grid = grid;
  return full;
}

}  // namespace bess
