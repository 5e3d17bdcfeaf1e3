// Time discretization, per-slot traces, error types and trace CSV I/O.
#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace bess {

enum class ErrorKind {
  dimension_mismatch,
  nonpositive_value,
  bounds_inverted,
  out_of_range,
  unknown_name,
  malformed_input,
  missing_input,
  inconsistent,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::nonpositive_value: return "nonpositive-value";
    case ErrorKind::bounds_inverted: return "bounds-inverted";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::unknown_name: return "unknown-name";
    case ErrorKind::malformed_input: return "malformed-input";
    case ErrorKind::missing_input: return "missing-input";
    case ErrorKind::inconsistent: return "inconsistent";
  }
  return "unknown";
}

/// Raised for any input that violates a documented invariant. The CLI maps
/// this to exit status 1.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Uniform slotting of one billing cycle.
struct TimeGrid {
  double slot_length_hours = 1.0;
  std::size_t slot_count = 720;
  std::string cycle_start = "2020-06-01T00:00";

  double duration_hours() const { return slot_length_hours * static_cast<double>(slot_count); }

  /// Number of slots per 24 h day; zero when the slot length does not divide a day.
  std::size_t slots_per_day() const {
    const double n = 24.0 / slot_length_hours;
    const double r = std::round(n);
    if (r < 1.0 || std::abs(n - r) > 1e-9) return 0;
    return static_cast<std::size_t>(r);
  }

  /// Hour of day at the start of `slot`, in [0, 24).
  double hour_of_day(std::size_t slot) const {
    return std::fmod(static_cast<double>(slot) * slot_length_hours, 24.0);
  }

  void validate() const {
    if (!(slot_length_hours > 0.0) || !std::isfinite(slot_length_hours))
      throw ValidationError(ErrorKind::nonpositive_value, "slot_length_hours must be > 0");
    if (slot_count < 1)
      throw ValidationError(ErrorKind::nonpositive_value, "slot_count must be >= 1");
  }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.slot_length_hours == b.slot_length_hours && a.slot_count == b.slot_count;
  }
};

enum class TraceKind { demand, ghi, temperature, wind_speed, generation, grid_power };

inline const char* to_string(TraceKind k) {
  switch (k) {
    case TraceKind::demand: return "demand";
    case TraceKind::ghi: return "ghi";
    case TraceKind::temperature: return "temperature";
    case TraceKind::wind_speed: return "wind_speed";
    case TraceKind::generation: return "generation";
    case TraceKind::grid_power: return "grid_power";
  }
  return "unknown";
}

inline bool is_nonnegative_kind(TraceKind k) {
  return k == TraceKind::demand || k == TraceKind::generation || k == TraceKind::grid_power ||
         k == TraceKind::ghi || k == TraceKind::wind_speed;
}

struct Trace {
  TimeGrid grid;
  std::vector<double> values;
  TraceKind kind = TraceKind::demand;

  Trace() = default;
  Trace(TimeGrid g, std::vector<double> v, TraceKind k)
      : grid(std::move(g)), values(std::move(v)), kind(k) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  void validate() const {
    grid.validate();
    if (values.size() != grid.slot_count)
      throw ValidationError(ErrorKind::dimension_mismatch,
                            std::string(to_string(kind)) + " trace has " +
                                std::to_string(values.size()) + " values for " +
                                std::to_string(grid.slot_count) + " slots");
    for (double v : values) {
      if (!std::isfinite(v))
        throw ValidationError(ErrorKind::malformed_input, "non-finite trace value");
      if (is_nonnegative_kind(kind) && v < 0.0)
        throw ValidationError(ErrorKind::out_of_range,
                              std::string(to_string(kind)) + " trace must be >= 0");
    }
  }
};

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ValidationError(ErrorKind::malformed_input, "cannot parse number '" + std::string(s) + "'");
  return v;
}

/// `slot,value` CSV; values use shortest round-trip formatting so export/import
/// is bit-identical.
inline void write_trace_csv(std::ostream& os, const Trace& t) {
  os << "slot,value\n";
  for (std::size_t i = 0; i < t.values.size(); ++i) os << i << ',' << format_double(t.values[i]) << '\n';
}

inline void write_trace_csv(const std::string& path, const Trace& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_trace_csv(os, t);
}

inline Trace read_trace_csv(std::istream& is, const TimeGrid& grid, TraceKind kind) {
  std::string line;
  if (!std::getline(is, line))
    throw ValidationError(ErrorKind::malformed_input, "empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "slot,value")
    throw ValidationError(ErrorKind::malformed_input, "trace header must be 'slot,value'");
  std::vector<double> values;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ValidationError(ErrorKind::malformed_input, "trace row without comma: " + line);
    const double slot = parse_double(std::string_view(line).substr(0, comma));
    if (slot != static_cast<double>(expected))
      throw ValidationError(ErrorKind::malformed_input,
                            "trace slots must run 0..T-1 in order, got " + line.substr(0, comma));
    values.push_back(parse_double(std::string_view(line).substr(comma + 1)));
    ++expected;
  }
  Trace t(grid, std::move(values), kind);
  t.validate();
  return t;
}

inline Trace read_trace_csv(const std::string& path, const TimeGrid& grid, TraceKind kind) {
  std::ifstream is(path);
  if (!is) throw ValidationError(ErrorKind::malformed_input, "cannot open trace file " + path);
  return read_trace_csv(is, grid, kind);
}

}  // namespace bess
