// Reference policies and the exhaustive small-horizon oracle.
#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "environment.hpp"
#include "qnetwork.hpp"

namespace bess {

enum class PolicyKind { grid_only, greedy, dqn, oracle };

inline const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::grid_only: return "grid_only";
    case PolicyKind::greedy: return "greedy";
    case PolicyKind::dqn: return "dqn";
    case PolicyKind::oracle: return "oracle";
  }
  return "?";
}

inline PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "grid_only") return PolicyKind::grid_only;
  if (s == "greedy") return PolicyKind::greedy;
  if (s == "dqn") return PolicyKind::dqn;
  if (s == "oracle") return PolicyKind::oracle;
  throw ValidationError(ErrorKind::unknown_name, "unknown policy '" + s + "'");
}

/// Always idle. Pair with grid_only_variant() for the no-deployment bill.
inline std::size_t grid_only_policy(const Observation&, const Environment& env) { return env.actions().idle_index(); }

/// Myopic: charge as hard as possible on surplus, otherwise the largest
/// discharge whose load-side delivery does not exceed the deficit.
inline std::size_t greedy_policy(const Observation&, const Environment& env) {
  const auto& s = env.state();
  const auto& grid = env.actions();
  const double surplus = s.generation_kw - s.demand_kw;
  if (surplus >= 0.0) return grid.max_charge_index();
  const double deficit = -surplus;
  const double eta = env.config().battery.eta_discharge;
  for (std::size_t idx = grid.max_discharge_index(); idx > grid.idle_index(); --idx) {
    const double b = env.decode(idx);
    if (b > 0.0 && eta * b <= deficit * (1.0 + 1e-12)) return idx;
  }
  return grid.idle_index();
}

/// Greedy argmax over a frozen Q-network.
struct DqnPolicy {
  const QNetwork* net;
  std::size_t operator()(const Observation& obs, const Environment&) const { return argmax(net->forward(obs)); }
};

class SearchSpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  std::size_t max_slots = 16;
  std::size_t max_levels = 5;
  double max_sequences = 1e8;
  unsigned workers = 1;  // partitions the first decision across threads
};

struct OracleResult {
  double min_total_cost = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> actions;
  CostBreakdown costs;
  std::size_t leaves = 0;
};

namespace detail {

struct OracleSearch {
  OracleResult best;
  std::vector<std::size_t> path;

  // Action indices with pairwise distinct decoded b, lowest index kept.
  static std::vector<std::size_t> distinct_actions(const Environment& env) {
    std::vector<std::size_t> reps;
    std::vector<double> seen;
    for (std::size_t i = 0; i < env.action_count(); ++i) {
      const double b = env.decode(i);
      bool dup = false;
      for (double s : seen) dup = dup || s == b;
      if (!dup) {
        seen.push_back(b);
        reps.push_back(i);
      }
    }
    return reps;
  }

  void run(const Environment& env) {
    if (env.done()) {
      ++best.leaves;
      const double total = env.costs().total();
      if (total < best.min_total_cost) {
        best.min_total_cost = total;
        best.actions = path;
        best.costs = env.costs();
      }
      return;
    }
    for (std::size_t a : distinct_actions(env)) {
      Environment child = env;
      child.step(a);
      path.push_back(a);
      run(child);
      path.pop_back();
    }
  }
};

}  // namespace detail

/// Minimum-total-cost action sequence over the whole horizon by enumeration
/// of every distinct feasible action sequence. Ties resolve to the
/// lexicographically first index sequence.
inline OracleResult exhaustive_oracle(const Environment& env_template, const OracleOptions& opt = {}) {
  Environment env = env_template;
  env.reset();
  const std::size_t T = env.horizon();
  const std::size_t K = env.action_count();
  // Masking leaves at most (K+1)/2 distinct operations per slot.
  const double sequences = std::pow(static_cast<double>((K + 1) / 2), static_cast<double>(T));
  if (T > opt.max_slots || K > opt.max_levels || sequences > opt.max_sequences)
    throw SearchSpaceError("oracle search space too large: T=" + std::to_string(T) + ", K=" + std::to_string(K));

  const auto first = detail::OracleSearch::distinct_actions(env);
  std::vector<OracleResult> branch(first.size());
  auto solve_branch = [&](std::size_t i) {
    detail::OracleSearch s;
    Environment child = env;
    child.step(first[i]);
    s.path.push_back(first[i]);
    s.run(child);
    return s.best;
  };
  if (opt.workers > 1) {
    std::vector<std::future<OracleResult>> futs;
    for (std::size_t i = 0; i < first.size(); ++i) futs.push_back(std::async(std::launch::async, solve_branch, i));
    for (std::size_t i = 0; i < first.size(); ++i) branch[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < first.size(); ++i) branch[i] = solve_branch(i);
  }

  OracleResult out;
  std::size_t leaves = 0;
  for (const auto& b : branch) {
    leaves += b.leaves;
    if (b.min_total_cost < out.min_total_cost) out = b;
  }
  out.leaves = leaves;
  return out;
}

/// Replays a fixed action sequence (e.g. the oracle's) as a policy.
struct SequencePolicy {
  std::vector<std::size_t> actions;
  std::size_t operator()(const Observation&, const Environment& env) const { return actions.at(env.state().slot); }
};

}  // namespace bess
