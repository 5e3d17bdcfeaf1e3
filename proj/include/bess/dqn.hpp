// Deep Q-learning with replay buffer and periodically synced target network.
//
// The trainer is generic over an episodic environment exposing
//   reset(), observe() -> std::vector<double>, step(a) -> {observation, reward, done, cost},
//   horizon(), action_count(), observation_size().
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "qnetwork.hpp"
#include "replay_buffer.hpp"

namespace bess {

struct Hyperparams {
  double learning_rate = 0.001;
  double epsilon = 0.9;  // probability of the greedy action
  double gamma = 0.9;
  std::size_t target_sync = 2000;  // tau
  std::size_t update_every = 4;    // kappa
  std::size_t batch_size = 64;
  std::size_t capacity = 10000;
  std::size_t episodes = 300;
  std::vector<std::size_t> hidden{64, 64};
  // Optional linear ramp of the greedy probability from epsilon_start to
  // epsilon over anneal_steps environment steps; 0 disables it.
  double epsilon_start = 0.0;
  std::size_t anneal_steps = 0;
  // Greedy evaluation every eval_every episodes; with select_best the
  // lowest-cost snapshot is returned instead of the final weights.
  bool select_best = true;
  std::size_t eval_every = 10;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ValidationError(ErrorKind::nonpositive_value, "learning rate must be > 0");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError(ErrorKind::out_of_range, "gamma must lie in (0,1]");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError(ErrorKind::out_of_range, "epsilon must lie in [0,1]");
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0))
      throw ValidationError(ErrorKind::out_of_range, "epsilon_start must lie in [0,1]");
    if (target_sync < 1 || update_every < 1)
      throw ValidationError(ErrorKind::nonpositive_value, "tau and kappa must be >= 1");
    if (batch_size < 1 || capacity < batch_size)
      throw ValidationError(ErrorKind::out_of_range, "need 1 <= batch_size <= capacity");
    if (eval_every < 1) throw ValidationError(ErrorKind::nonpositive_value, "eval_every must be >= 1");
  }

  double epsilon_at(std::size_t step) const {
    if (anneal_steps == 0) return epsilon;
    const double f = std::min(1.0, static_cast<double>(step) / static_cast<double>(anneal_steps));
    return epsilon_start + (epsilon - epsilon_start) * f;
  }
};

/// Bootstrap targets: r for terminal transitions, r + gamma * max_a Q_target(s', a) otherwise.
inline std::vector<double> compute_target(std::span<const Transition* const> batch, const QNetwork& target,
                                          double gamma) {
  if (batch.empty()) throw std::invalid_argument("compute_target needs a nonempty batch");
  std::vector<double> out;
  out.reserve(batch.size());
  for (const Transition* t : batch) {
    if (t->done) {
      out.push_back(t->reward);
    } else {
      const auto q = target.forward(t->next_obs);
      out.push_back(t->reward + gamma * *std::max_element(q.begin(), q.end()));
    }
  }
  return out;
}

struct EpisodeLog {
  std::size_t episode = 0;
  double total_cost = 0.0;
  double total_reward = 0.0;
  double epsilon = 0.0;
  double loss_mean = 0.0;
};

struct TrainResult {
  QNetwork net;
  std::vector<EpisodeLog> log;
  std::size_t best_episode = 0;  // episode after which the returned net was taken
  double best_eval_cost = std::numeric_limits<double>::infinity();
};

struct GreedyEvaluation {
  double total_cost = 0.0;
  double total_reward = 0.0;
};

/// One deterministic greedy episode with a frozen network.
template <typename Env>
GreedyEvaluation evaluate_greedy(const QNetwork& net, Env env) {
  env.reset();
  GreedyEvaluation out;
  auto obs = env.observe();
  for (std::size_t t = 0; t < env.horizon(); ++t) {
    auto res = env.step(argmax(net.forward(obs)));
    out.total_cost += res.cost;
    out.total_reward += res.reward;
    obs = std::move(res.observation);
    if (res.done) break;
  }
  return out;
}

/// Deep Q-learning loop; fully deterministic given `seed`.
template <typename Env>
TrainResult train(Env env, const Hyperparams& hp, std::uint64_t seed) {
  hp.validate();
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> sizes{env.observation_size()};
  sizes.insert(sizes.end(), hp.hidden.begin(), hp.hidden.end());
  sizes.push_back(env.action_count());

  TrainResult result;
  QNetwork main = QNetwork::random(sizes, rng);
  QNetwork target = main;
  ReplayBuffer buffer(hp.capacity);
  result.net = main;
  if (hp.episodes == 0) return result;

  std::vector<QSample> samples;
  std::size_t step = 0;
  for (std::size_t ep = 0; ep < hp.episodes; ++ep) {
    env.reset();
    auto obs = env.observe();
    EpisodeLog log;
    log.episode = ep;
    double loss_sum = 0.0;
    std::size_t updates = 0;
    for (std::size_t t = 0; t < env.horizon(); ++t) {
      const double eps = hp.epsilon_at(step);
      log.epsilon = eps;
      const std::size_t a = select_action(main, obs, eps, rng);
      auto res = env.step(a);
      log.total_cost += res.cost;
      log.total_reward += res.reward;
      buffer.push({obs, a, res.reward, res.observation, res.done});
      ++step;

      if (step % hp.update_every == 0 && buffer.size() >= hp.batch_size) {
        const auto batch = buffer.sample(hp.batch_size, rng);
        const auto targets = compute_target(batch, target, hp.gamma);
        samples.clear();
        for (std::size_t i = 0; i < batch.size(); ++i) samples.push_back({batch[i]->obs, batch[i]->action, targets[i]});
        try {
          loss_sum += train_step(main, samples, hp.learning_rate);
        } catch (const DivergenceError& e) {
          throw DivergenceError("training diverged in episode " + std::to_string(ep) + ": " + e.what());
        }
        ++updates;
      }
      if (step % hp.target_sync == 0) sync_target(main, target);

      obs = std::move(res.observation);
      if (res.done) break;
    }
    log.loss_mean = updates > 0 ? loss_sum / static_cast<double>(updates) : 0.0;
    result.log.push_back(log);

    if (hp.select_best && ((ep + 1) % hp.eval_every == 0 || ep + 1 == hp.episodes)) {
      const auto eval = evaluate_greedy(main, env);
      if (eval.total_cost < result.best_eval_cost) {
        result.best_eval_cost = eval.total_cost;
        result.best_episode = ep;
        result.net = main;
      }
    }
  }
  if (!hp.select_best) {
    result.net = main;
    result.best_episode = hp.episodes - 1;
  }
  return result;
}

inline void write_training_log_csv(std::ostream& os, const std::vector<EpisodeLog>& log) {
  os << "episode,total_cost,total_reward,epsilon,loss_mean\n";
  for (const auto& e : log)
    os << e.episode << ',' << format_double(e.total_cost) << ',' << format_double(e.total_reward) << ','
       << format_double(e.epsilon) << ',' << format_double(e.loss_mean) << '\n';
}

}  // namespace bess
