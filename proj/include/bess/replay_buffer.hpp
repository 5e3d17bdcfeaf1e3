#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bess {

struct Transition {
  std::vector<double> obs;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool done = false;
};

/// Fixed-capacity FIFO ring of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
    ring_.reserve(capacity);
  }

  void push(Transition t) {
    if (ring_.size() < capacity_) {
      perm_.push_back(ring_.size());
      ring_.push_back(std::move(t));
    } else {
      ring_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// i-th oldest stored transition.
  const Transition& operator[](std::size_t i) const { return ring_[(head_ + i) % ring_.size()]; }

  /// `n` distinct transitions, uniformly at random (partial Fisher-Yates).
  template <typename Rng>
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) {
    if (n > ring_.size()) throw std::invalid_argument("sample larger than buffer");
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, perm_.size() - 1);
      std::swap(perm_[i], perm_[pick(rng)]);
      out.push_back(&ring_[perm_[i]]);
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> ring_;
  std::vector<std::size_t> perm_;  // any permutation of 0..size-1
};

}  // namespace bess
