// Copyright 2026 The slicesim Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// DQN: feed-forward Q-network, experience replay, target network and the
// temporal-difference update. Everything runs on doubles in plain loops so
// that training is bit-reproducible for a given seed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "slicesim/error.hpp"

namespace slicesim {

enum class Activation { kRelu, kLinear };

struct DenseLayer {
  int in = 0;
  int out = 0;
  Activation act = Activation::kRelu;
  std::vector<double> w;  // out x in, row-major
  std::vector<double> b;  // out
};

// Parameter-shaped buffer used for gradients.
struct MlpGradients {
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;

  void scale(double s) {
    for (auto& v : w) for (double& x : v) x *= s;
    for (auto& v : b) for (double& x : v) x *= s;
  }
  double squared_norm() const {
    double n = 0;
    for (const auto& v : w) for (double x : v) n += x * x;
    for (const auto& v : b) for (double x : v) n += x * x;
    return n;
  }
};

class Mlp {
 public:
  Mlp() = default;

  // Hidden layers use ReLU, the head is linear. Weights are He-uniform,
  // biases zero.
  Mlp(std::span<const int> sizes, std::uint64_t seed) {
    if (sizes.size() < 2) throw UsageError("an MLP needs at least input and output sizes");
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      DenseLayer l;
      l.in = sizes[i];
      l.out = sizes[i + 1];
      l.act = i + 2 == sizes.size() ? Activation::kLinear : Activation::kRelu;
      const double bound = std::sqrt(6.0 / l.in);
      std::uniform_real_distribution<double> u(-bound, bound);
      l.w.resize(static_cast<std::size_t>(l.in) * l.out);
      for (double& x : l.w) x = u(rng);
      l.b.assign(l.out, 0.0);
      layers_.push_back(std::move(l));
    }
  }

  int input_size() const { return layers_.empty() ? 0 : layers_.front().in; }
  int output_size() const { return layers_.empty() ? 0 : layers_.back().out; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::vector<int> sizes() const {
    std::vector<int> s;
    if (layers_.empty()) return s;
    s.push_back(layers_.front().in);
    for (const auto& l : layers_) s.push_back(l.out);
    return s;
  }

  // Activations of every layer, input first; needed by backward().
  struct Trace {
    std::vector<std::vector<double>> acts;
  };

  std::vector<double> forward(std::span<const double> x) const {
    Trace t = forward_trace(x);
    return std::move(t.acts.back());
  }

  Trace forward_trace(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_size()) throw UsageError("state length does not match network input");
    Trace t;
    t.acts.emplace_back(x.begin(), x.end());
    for (const auto& l : layers_) {
      const auto& in = t.acts.back();
      std::vector<double> out(l.out);
      for (int o = 0; o < l.out; ++o) {
        double s = l.b[o];
        const double* row = &l.w[static_cast<std::size_t>(o) * l.in];
        for (int i = 0; i < l.in; ++i) s += row[i] * in[i];
        out[o] = (l.act == Activation::kRelu && s < 0) ? 0.0 : s;
      }
      t.acts.push_back(std::move(out));
    }
    return t;
  }

  MlpGradients zero_gradients() const {
    MlpGradients g;
    for (const auto& l : layers_) {
      g.w.emplace_back(l.w.size(), 0.0);
      g.b.emplace_back(l.b.size(), 0.0);
    }
    return g;
  }

  // Accumulates dL/dtheta into `g` given dL/d(output) for the traced input.
  void backward(const Trace& t, std::span<const double> grad_out, MlpGradients& g) const {
    std::vector<double> delta(grad_out.begin(), grad_out.end());
    for (int li = static_cast<int>(layers_.size()) - 1; li >= 0; --li) {
      const auto& l = layers_[li];
      const auto& in = t.acts[li];
      const auto& out = t.acts[li + 1];
      if (l.act == Activation::kRelu) {
        for (int o = 0; o < l.out; ++o) {
          if (out[o] <= 0) delta[o] = 0;
        }
      }
      std::vector<double> prev(l.in, 0.0);
      for (int o = 0; o < l.out; ++o) {
        if (delta[o] == 0) continue;
        g.b[li][o] += delta[o];
        const std::size_t base = static_cast<std::size_t>(o) * l.in;
        for (int i = 0; i < l.in; ++i) {
          g.w[li][base + i] += delta[o] * in[i];
          prev[i] += delta[o] * l.w[base + i];
        }
      }
      delta = std::move(prev);
    }
  }

  void apply_sgd(const MlpGradients& g, double lr) {
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      for (std::size_t k = 0; k < layers_[li].w.size(); ++k) layers_[li].w[k] -= lr * g.w[li][k];
      for (std::size_t k = 0; k < layers_[li].b.size(); ++k) layers_[li].b[k] -= lr * g.b[li][k];
    }
  }

  std::size_t num_params() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.w.size() + l.b.size();
    return n;
  }

  // Flat view: layer by layer, weights then biases.
  std::vector<double> flat_params() const {
    std::vector<double> p;
    p.reserve(num_params());
    for (const auto& l : layers_) {
      p.insert(p.end(), l.w.begin(), l.w.end());
      p.insert(p.end(), l.b.begin(), l.b.end());
    }
    return p;
  }

  void set_flat_params(std::span<const double> p) {
    if (p.size() != num_params()) throw UsageError("parameter count mismatch");
    std::size_t k = 0;
    for (auto& l : layers_) {
      for (double& x : l.w) x = p[k++];
      for (double& x : l.b) x = p[k++];
    }
  }

  static std::vector<double> flatten(const MlpGradients& g) {
    std::vector<double> p;
    for (std::size_t li = 0; li < g.w.size(); ++li) {
      p.insert(p.end(), g.w[li].begin(), g.w[li].end());
      p.insert(p.end(), g.b[li].begin(), g.b[li].end());
    }
    return p;
  }

  bool operator==(const Mlp& o) const {
    return sizes() == o.sizes() && flat_params() == o.flat_params();
  }

 private:
  std::vector<DenseLayer> layers_;
};

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0;
  std::vector<double> next_state;
  bool terminal = false;
};

// Fixed-capacity ring; once full the oldest transition is overwritten.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw UsageError("replay capacity must be >= 1");
    items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
  }

  void store(Transition t) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  // Uniform with replacement.
  std::vector<const Transition*> sample(std::size_t batch, std::mt19937_64& rng) const {
    if (items_.empty()) throw UsageError("cannot sample from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(&items_[pick(rng)]);
    return out;
  }

  // i-th oldest stored transition.
  const Transition& at(std::size_t i) const { return items_.at((head_ + i) % items_.size()); }
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // oldest slot once full
  std::vector<Transition> items_;
};

inline int argmax(std::span<const double> v) {
  if (v.empty()) throw UsageError("argmax of an empty vector");
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());  // first maximum
}

// Epsilon-greedy. Always consumes one uniform draw, plus one more when exploring.
inline int select_action(std::span<const double> qvals, double epsilon, std::mt19937_64& rng) {
  if (!(epsilon >= 0 && epsilon <= 1)) throw UsageError("epsilon must lie in [0,1]");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(qvals.size()) - 1);
    return pick(rng);
  }
  return argmax(qvals);
}

// y = r + gamma max_a' q(s', a'; theta'), or r for terminal transitions.
inline double td_target(const Mlp& target, const Transition& t, double gamma) {
  if (t.terminal) return t.reward;
  const auto q = target.forward(t.next_state);
  return t.reward + gamma * *std::max_element(q.begin(), q.end());
}

// L = (1/B) sum (y - q(s, a; theta))^2
inline double td_loss(const Mlp& online, const Mlp& target, std::span<const Transition* const> batch,
                      double gamma) {
  double loss = 0;
  for (const Transition* t : batch) {
    const double y = td_target(target, *t, gamma);
    const double q = online.forward(t->state).at(t->action);
    loss += (y - q) * (y - q);
  }
  return loss / static_cast<double>(batch.size());
}

struct TdResult {
  double loss = 0;
  MlpGradients grad;
};

inline TdResult td_loss_and_gradient(const Mlp& online, const Mlp& target,
                                     std::span<const Transition* const> batch, double gamma) {
  TdResult r{0.0, online.zero_gradients()};
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  std::vector<double> grad_out(online.output_size());
  for (const Transition* t : batch) {
    const double y = td_target(target, *t, gamma);
    const auto trace = online.forward_trace(t->state);
    const double q = trace.acts.back().at(t->action);
    r.loss += (y - q) * (y - q) * inv_b;
    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    grad_out[t->action] = -2.0 * (y - q) * inv_b;
    online.backward(trace, grad_out, r.grad);
  }
  return r;
}

struct TrainConfig {
  double discount = 0.9;
  int batch = 32;
  double learning_rate = 1e-3;
  double grad_clip = 10.0;  // global L2 norm; <= 0 disables
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.6;  // of all training epochs
  int target_sync = 50;                 // train steps between target syncs
  int replay_capacity = 10000;
  std::vector<int> hidden = {64, 64};
  int updates_per_epoch = 32;  // gradient steps per environment epoch
  int min_replay = 32;  // transitions stored before training starts
  int episodes = 1;

  void validate() const {
    if (!(discount >= 0 && discount < 1)) throw UsageError("discount must lie in [0,1)");
    if (batch < 1) throw UsageError("batch must be >= 1");
    if (!(learning_rate > 0)) throw UsageError("learning_rate must be > 0");
    for (double e : {epsilon_start, epsilon_end}) {
      if (!(e >= 0 && e <= 1)) throw UsageError("epsilon must lie in [0,1]");
    }
    if (!(epsilon_decay_fraction >= 0 && epsilon_decay_fraction <= 1)) {
      throw UsageError("epsilon_decay_fraction must lie in [0,1]");
    }
    if (target_sync < 1) throw UsageError("target_sync must be >= 1");
    if (replay_capacity < 1) throw UsageError("replay_capacity must be >= 1");
    if (updates_per_epoch < 0) throw UsageError("updates_per_epoch must be >= 0");
    if (episodes < 1) throw UsageError("episodes must be >= 1");
    for (int h : hidden) {
      if (h < 1) throw UsageError("hidden sizes must be >= 1");
    }
  }

  // Linear decay from start to end over the first `epsilon_decay_fraction` of training.
  double epsilon_at(long epoch, long total_epochs) const {
    const double horizon = epsilon_decay_fraction * static_cast<double>(total_epochs);
    if (horizon <= 0 || epoch >= horizon) return epsilon_end;
    return epsilon_start + (epsilon_end - epsilon_start) * (static_cast<double>(epoch) / horizon);
  }
};

class DqnAgent {
 public:
  DqnAgent(int observation_size, int num_actions, TrainConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)), replay_(cfg_.replay_capacity), rng_(seed) {
    cfg_.validate();
    std::vector<int> sizes{observation_size};
    sizes.insert(sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    sizes.push_back(num_actions);
    online_ = Mlp(sizes, rng_());
    target_ = online_;
  }

  int act(std::span<const double> state, double epsilon) {
    return select_action(online_.forward(state), epsilon, rng_);
  }

  int greedy(std::span<const double> state) const { return argmax(online_.forward(state)); }

  void store(Transition t) { replay_.store(std::move(t)); }

  // One TD update on a uniformly sampled batch. Returns the pre-step loss, or
  // nothing when the replay is still empty.
  std::optional<double> train_step() {
    if (replay_.empty()) return std::nullopt;
    const auto batch = replay_.sample(cfg_.batch, rng_);
    const double loss = update(batch);
    if (++train_steps_ % cfg_.target_sync == 0) sync_target();
    return loss;
  }

  // Gradient step on a given batch; no target sync bookkeeping.
  double update(std::span<const Transition* const> batch) {
    auto r = td_loss_and_gradient(online_, target_, batch, cfg_.discount);
    if (cfg_.grad_clip > 0) {
      const double norm = std::sqrt(r.grad.squared_norm());
      if (norm > cfg_.grad_clip) r.grad.scale(cfg_.grad_clip / norm);
    }
    online_.apply_sgd(r.grad, cfg_.learning_rate);
    return r.loss;
  }

  // Called once per environment epoch: store, then run the configured number of updates.
  void observe(Transition t) {
    store(std::move(t));
    if (static_cast<int>(replay_.size()) < cfg_.min_replay) return;
    for (int i = 0; i < cfg_.updates_per_epoch; ++i) train_step();
  }

  void sync_target() {
    target_ = online_;
    ++syncs_;
  }

  const Mlp& online() const { return online_; }
  const Mlp& target() const { return target_; }
  Mlp& online() { return online_; }
  const ReplayBuffer& replay() const { return replay_; }
  const TrainConfig& config() const { return cfg_; }
  long train_steps() const { return train_steps_; }
  long syncs() const { return syncs_; }
  void set_train_steps(long n) { train_steps_ = n; }

 private:
  TrainConfig cfg_;
  ReplayBuffer replay_;
  std::mt19937_64 rng_;
  Mlp online_;
  Mlp target_;
  long train_steps_ = 0;
  long syncs_ = 0;
};

// Text checkpoint: header, layer sizes, step counter, then every parameter as a
// hex float so the round trip is exact.
inline constexpr const char* kCheckpointMagic = "slicesim-qnet";
inline constexpr int kCheckpointVersion = 1;

inline void save_checkpoint(const std::string& path, const Mlp& net, long train_steps) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write checkpoint " + path);
  os << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  os << "train_steps " << train_steps << '\n';
  const auto sizes = net.sizes();
  os << "sizes " << sizes.size();
  for (int s : sizes) os << ' ' << s;
  os << '\n';
  char buf[64];
  for (double p : net.flat_params()) {
    std::snprintf(buf, sizeof buf, "%a\n", p);
    os << buf;
  }
}

struct Checkpoint {
  Mlp net;
  long train_steps = 0;
};

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read checkpoint " + path);
  std::string magic, key;
  int version = 0;
  is >> magic >> version;
  if (magic != kCheckpointMagic) throw UsageError("not a checkpoint file: " + path);
  if (version != kCheckpointVersion) throw UsageError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint c;
  std::size_t n = 0;
  is >> key >> c.train_steps >> key >> n;
  std::vector<int> sizes(n);
  for (auto& s : sizes) is >> s;
  if (!is || n < 2) throw UsageError("corrupt checkpoint header: " + path);
  c.net = Mlp(sizes, 0);
  std::vector<double> params(c.net.num_params());
  std::string tok;
  for (auto& p : params) {
    if (!(is >> tok)) throw UsageError("truncated checkpoint: " + path);
    p = std::strtod(tok.c_str(), nullptr);
  }
  c.net.set_flat_params(params);
  return c;
}

}  // namespace slicesim
