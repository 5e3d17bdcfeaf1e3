// Small hand-built environments for tests.
#pragma once

#include <bess/bess.hpp>

#include <memory>
#include <vector>

namespace fixtures {

/// Scenario of `d.size()` hourly slots with the given demand and generation
/// (generation attributed to wind).
inline bess::Environment make_env(const std::vector<double>& d, const std::vector<double>& g,
                                  bess::ScenarioConfig cfg = {}, double initial_soc = 0.5) {
  using namespace bess;
  const std::size_t T = d.size();
  cfg.grid.slot_length_hours = 1.0;
  cfg.grid.slot_count = T;
  cfg.weather_calendar.assign((T + 23) / 24, WeatherDayClass{});
  cfg.battery.initial_soc = initial_soc;
  auto data = std::make_shared<ScenarioData>();
  data->grid = cfg.grid;
  data->demand = Trace(cfg.grid, d, TraceKind::demand);
  const std::vector<double> zeros(T, 0.0);
  data->weather = {Trace(cfg.grid, zeros, TraceKind::ghi), Trace(cfg.grid, zeros, TraceKind::temperature),
                   Trace(cfg.grid, zeros, TraceKind::wind_speed)};
  data->generation = {Trace(cfg.grid, zeros, TraceKind::generation), Trace(cfg.grid, g, TraceKind::generation),
                      Trace(cfg.grid, g, TraceKind::generation)};
  return Environment(std::make_shared<const ScenarioConfig>(cfg), data);
}

}  // namespace fixtures
