// Deterministic two-state, two-action MDP used to check that the DQN trainer
// finds the optimal policy of a problem solvable by value iteration.
//
//   state 0: action 0 -> stay in 0, reward 0.3;  action 1 -> move to 1, reward 0
//   state 1: action 0 -> move to 0, reward 0;    action 1 -> stay in 1, reward 1
//
// With gamma = 0.9 the myopic choice in state 0 (action 0) is suboptimal.
// Episodes are truncated after `horizon` steps without a terminal flag, so the
// discounted infinite-horizon values are the right reference.
#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bess {

struct ToyMdpSpec {
  // next_state[s][a], reward[s][a]
  std::array<std::array<std::size_t, 2>, 2> next_state{{{0, 1}, {0, 1}}};
  std::array<std::array<double, 2>, 2> reward{{{0.3, 0.0}, {0.0, 1.0}}};
};

class ToyMdp {
 public:
  struct Step {
    std::vector<double> observation;
    double reward;
    bool done;
    double cost;
  };

  explicit ToyMdp(std::size_t horizon = 20, ToyMdpSpec spec = {}) : spec_(spec), horizon_(horizon) {}

  void reset() {
    state_ = 0;
    t_ = 0;
  }
  std::vector<double> observe() const { return encode(state_); }

  Step step(std::size_t a) {
    if (a > 1) throw std::out_of_range("toy MDP has two actions");
    const double r = spec_.reward[state_][a];
    state_ = spec_.next_state[state_][a];
    ++t_;
    return {encode(state_), r, false, -r};
  }

  std::size_t horizon() const { return horizon_; }
  std::size_t action_count() const { return 2; }
  std::size_t observation_size() const { return 2; }
  std::size_t state() const { return state_; }
  const ToyMdpSpec& spec() const { return spec_; }

  static std::vector<double> encode(std::size_t s) { return s == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0}; }

 private:
  ToyMdpSpec spec_;
  std::size_t horizon_;
  std::size_t state_ = 0;
  std::size_t t_ = 0;
};

}  // namespace bess
