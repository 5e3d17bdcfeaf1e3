// Fully connected Q-function: rectified-linear hidden layers, identity output,
// trained by plain SGD on the squared TD error of the taken action.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace bess {

/// Non-finite loss or gradient during training.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One regression sample: push Q(obs)[action] toward target.
struct QSample {
  std::span<const double> obs;
  std::size_t action;
  double target;
};

class QNetwork {
 public:
  QNetwork() = default;

  /// All-zero parameters.
  explicit QNetwork(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw ValidationError(ErrorKind::malformed_input, "network needs at least two layers");
    for (auto s : sizes_)
      if (s == 0) throw ValidationError(ErrorKind::nonpositive_value, "layer sizes must be > 0");
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      weight_offset_.push_back(n);
      n += sizes_[l] * sizes_[l + 1];
      bias_offset_.push_back(n);
      n += sizes_[l + 1];
    }
    params_.assign(n, 0.0);
  }

  /// He-uniform weights, zero biases.
  template <typename Rng>
  static QNetwork random(std::vector<std::size_t> layer_sizes, Rng& rng) {
    QNetwork net(std::move(layer_sizes));
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      const double limit = std::sqrt(6.0 / static_cast<double>(net.sizes_[l]));
      std::uniform_real_distribution<double> u(-limit, limit);
      const std::size_t n = net.sizes_[l] * net.sizes_[l + 1];
      for (std::size_t i = 0; i < n; ++i) net.params_[net.weight_offset_[l] + i] = u(rng);
    }
    return net;
  }

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t layer_count() const { return sizes_.empty() ? 0 : sizes_.size() - 1; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  std::vector<double> forward(std::span<const double> x) const {
    if (x.size() != input_size()) throw std::invalid_argument("observation size does not match the network input");
    std::vector<double> a(x.begin(), x.end()), z;
    for (std::size_t l = 0; l < layer_count(); ++l) {
      affine(l, a, z);
      if (l + 1 < layer_count())
        for (double& v : z) v = std::max(0.0, v);
      a.swap(z);
    }
    return a;
  }

  /// Mean over the batch of (target - Q(obs)[action])^2.
  double loss(std::span<const QSample> batch) const {
    double sum = 0.0;
    for (const auto& s : batch) {
      const double e = s.target - forward(s.obs)[s.action];
      sum += e * e;
    }
    return sum / static_cast<double>(batch.size());
  }

  /// Loss and its gradient with respect to every parameter (same layout as
  /// parameters()). The gradient flows only through the taken action's output.
  double loss_and_gradient(std::span<const QSample> batch, std::vector<double>& grad) const {
    grad.assign(params_.size(), 0.0);
    const std::size_t L = layer_count();
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    std::vector<std::vector<double>> act(L + 1), pre(L);
    std::vector<double> delta, prev;
    double sum = 0.0;

    for (const auto& s : batch) {
      if (s.obs.size() != input_size()) throw std::invalid_argument("observation size does not match the network input");
      act[0].assign(s.obs.begin(), s.obs.end());
      for (std::size_t l = 0; l < L; ++l) {
        affine(l, act[l], pre[l]);
        act[l + 1] = pre[l];
        if (l + 1 < L)
          for (double& v : act[l + 1]) v = std::max(0.0, v);
      }
      const double err = s.target - act[L][s.action];
      sum += err * err;

      delta.assign(output_size(), 0.0);
      delta[s.action] = -2.0 * err * inv_n;
      for (std::size_t l = L; l-- > 0;) {
        const std::size_t in = sizes_[l], out = sizes_[l + 1];
        const double* w = params_.data() + weight_offset_[l];
        double* gw = grad.data() + weight_offset_[l];
        double* gb = grad.data() + bias_offset_[l];
        const auto& a_in = act[l];
        for (std::size_t j = 0; j < out; ++j) {
          const double dj = delta[j];
          if (dj == 0.0) continue;
          gb[j] += dj;
          for (std::size_t i = 0; i < in; ++i) gw[j * in + i] += dj * a_in[i];
        }
        if (l == 0) break;
        prev.assign(in, 0.0);
        for (std::size_t j = 0; j < out; ++j) {
          const double dj = delta[j];
          if (dj == 0.0) continue;
          for (std::size_t i = 0; i < in; ++i) prev[i] += w[j * in + i] * dj;
        }
        for (std::size_t i = 0; i < in; ++i)
          if (!(pre[l - 1][i] > 0.0)) prev[i] = 0.0;
        delta.swap(prev);
      }
    }
    return sum * inv_n;
  }

  friend bool operator==(const QNetwork& a, const QNetwork& b) {
    return a.sizes_ == b.sizes_ && a.params_ == b.params_;
  }

 private:
  void affine(std::size_t l, const std::vector<double>& in_v, std::vector<double>& out_v) const {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    const double* w = params_.data() + weight_offset_[l];
    const double* b = params_.data() + bias_offset_[l];
    out_v.resize(out);
    for (std::size_t j = 0; j < out; ++j) {
      double acc = b[j];
      const double* row = w + j * in;
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * in_v[i];
      out_v[j] = acc;
    }
  }

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> weight_offset_;
  std::vector<std::size_t> bias_offset_;
  std::vector<double> params_;
};

inline std::vector<double> q_values(const QNetwork& net, std::span<const double> obs) { return net.forward(obs); }

/// First index of the maximum.
inline std::size_t argmax(std::span<const double> q) {
  return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
}

/// Greedy with probability `epsilon`, uniform random otherwise.
template <typename Rng>
std::size_t select_action(const QNetwork& net, std::span<const double> obs, double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) return argmax(net.forward(obs));
  std::uniform_int_distribution<std::size_t> pick(0, net.output_size() - 1);
  return pick(rng);
}

/// One SGD step theta <- theta - lr * grad. Returns the pre-update loss.
inline double train_step(QNetwork& net, std::span<const QSample> batch, double lr) {
  if (batch.empty()) throw std::invalid_argument("train_step needs a nonempty batch");
  std::vector<double> grad;
  const double loss = net.loss_and_gradient(batch, grad);
  if (!std::isfinite(loss)) throw DivergenceError("non-finite loss " + std::to_string(loss));
  for (double g : grad)
    if (!std::isfinite(g)) throw DivergenceError("non-finite gradient");
  auto p = net.parameters();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * grad[i];
  return loss;
}

inline void sync_target(const QNetwork& main, QNetwork& target) {
  if (main.layer_sizes() != target.layer_sizes())
    throw std::invalid_argument("target network architecture differs from the main network");
  std::ranges::copy(main.parameters(), target.parameters().begin());
}

// --- checkpoint ---------------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json checkpoint_to_json(const QNetwork& net) {
  nlohmann::json j;
  j["format"] = "bess-qnetwork";
  j["version"] = kCheckpointVersion;
  j["layer_sizes"] = net.layer_sizes();
  j["parameters"] = std::vector<double>(net.parameters().begin(), net.parameters().end());
  return j;
}

inline QNetwork checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "bess-qnetwork")
      throw ValidationError(ErrorKind::malformed_input, "not a Q-network checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw ValidationError(ErrorKind::malformed_input, "unsupported checkpoint version");
    QNetwork net(j.at("layer_sizes").get<std::vector<std::size_t>>());
    const auto params = j.at("parameters").get<std::vector<double>>();
    if (params.size() != net.parameters().size())
      throw ValidationError(ErrorKind::dimension_mismatch, "checkpoint parameter count mismatch");
    std::ranges::copy(params, net.parameters().begin());
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(ErrorKind::malformed_input, std::string("checkpoint JSON: ") + e.what());
  }
}

inline void save_checkpoint(const std::string& path, const QNetwork& net) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << checkpoint_to_json(net).dump() << '\n';
}

inline QNetwork load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError(ErrorKind::malformed_input, "cannot open checkpoint " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(ErrorKind::malformed_input, std::string("checkpoint JSON: ") + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace bess
