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

// The slicing MDP. One step is one epoch of T TTIs at a fixed allocation.
//
// Per TTI the pipeline is: fading -> arrivals -> deadline expiry -> dedicated
// scheduling -> common-pool split -> scheduling of common grants -> serve.
// With the hybrid flag off the common pool is an idle reserve that no UE may use.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "slicesim/allocation.hpp"
#include "slicesim/error.hpp"
#include "slicesim/metrics.hpp"
#include "slicesim/radio.hpp"
#include "slicesim/scheduler.hpp"
#include "slicesim/traffic.hpp"

namespace slicesim {

// splitmix64 finalizer; derives independent stream seeds from one run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct SliceConfig {
  std::string name;
  int num_ues = 0;
  TrafficModel traffic;
  SlaTarget sla;
  SchedulerKind scheduler = SchedulerKind::kProportionalFair;
  bool short_packets = false;
  double error_prob = 1e-5;  // used when short_packets
  double alpha = 1.0;
  double isolation_threshold = 0.8;
  int priority = 0;  // common-pool priority, higher first
  bool random_phase = false;
};

struct EnvConfig {
  ChannelParams channel;
  double cell_side_m = 500.0;
  int ttis_per_epoch = 200;
  int epochs_per_episode = 200;
  std::vector<SliceConfig> slices;
  int initial_common = 30;
  std::vector<int> initial_dedicated;  // empty: NVS split of W - initial_common
  std::vector<double> nvs_weights;     // empty: traffic-proportional
  double beta = 5.0;
  double rho = 10.0;
  bool hybrid = true;
  std::vector<int> action_set = {-5, -2, 0, 2, 5};
  int min_dedicated = 1;
  double pf_window = PfTracker::kDefaultWindow;

  int num_rbs() const { return channel.num_rbs; }
  int num_slices() const { return static_cast<int>(slices.size()); }
  int observation_size() const { return 4 * num_slices(); }

  int num_actions() const {
    int n = 1;
    for (int m = 0; m < num_slices(); ++m) n *= static_cast<int>(action_set.size());
    return n;
  }

  // Aggregate offered load per slice, the default NVS weighting.
  std::vector<double> traffic_weights() const {
    std::vector<double> w;
    for (const auto& s : slices) w.push_back(s.traffic.rate_pps * s.traffic.packet_bits * s.num_ues);
    return w;
  }

  NvsWeights resolved_nvs_weights() const {
    return NvsWeights::normalized(nvs_weights.empty() ? traffic_weights() : nvs_weights);
  }

  // Allocation at reset: explicit dedicated pools if given, otherwise the NVS
  // split of the non-common RBs raised to the per-slice floor.
  Allocation initial_allocation() const {
    Allocation a;
    a.common = initial_common;
    if (!initial_dedicated.empty()) {
      a.dedicated = initial_dedicated;
    } else {
      a.dedicated = largest_remainder(resolved_nvs_weights().weights, num_rbs() - initial_common);
      enforce_floor(a.dedicated, min_dedicated);
    }
    return a;
  }

  void validate() const {
    try {
      channel.validate();
    } catch (const InputError& e) {
      throw ConfigError("channel", e.what());
    }
    if (slices.empty()) throw ConfigError("slices", "at least one slice is required");
    if (ttis_per_epoch < 1) throw ConfigError("ttis_per_epoch", "must be >= 1");
    if (epochs_per_episode < 1) throw ConfigError("epochs_per_episode", "must be >= 1");
    if (!(cell_side_m > 2.0)) throw ConfigError("cell_side_m", "must be > 2");
    if (action_set.empty()) throw ConfigError("action_set", "must not be empty");
    if (std::find(action_set.begin(), action_set.end(), 0) == action_set.end()) {
      throw ConfigError("action_set", "must contain the no-op 0");
    }
    for (int a : action_set) {
      if (std::abs(a) >= num_rbs()) throw ConfigError("action_set", "|delta| must be < W");
    }
    if (min_dedicated < 0) throw ConfigError("min_dedicated", "must be >= 0");
    if (initial_common < 0) throw ConfigError("initial_common", "must be >= 0");
    if (!hybrid && initial_common != 0) {
      throw ConfigError("initial_common", "must be 0 when the common slice is disabled");
    }
    if (!(rho >= 0)) throw ConfigError("rho", "must be >= 0");
    if (!(beta >= 0)) throw ConfigError("beta", "must be >= 0");
    if (!nvs_weights.empty() && nvs_weights.size() != slices.size()) {
      throw ConfigError("nvs_weights", "one weight per slice");
    }
    for (std::size_t m = 0; m < slices.size(); ++m) {
      const auto& s = slices[m];
      const std::string f = "slices[" + std::to_string(m) + "]";
      if (s.num_ues < 0) throw ConfigError(f + ".num_ues", "must be >= 0");
      try {
        s.traffic.validate();
        s.sla.validate();
        if (s.short_packets) ShortPacketParams{s.error_prob, kSymbolsPerRb}.validate();
      } catch (const InputError& e) {
        throw ConfigError(f, e.what());
      }
      if (!(s.isolation_threshold > 0 && s.isolation_threshold <= 1)) {
        throw ConfigError(f + ".isolation_threshold", "must lie in (0,1]");
      }
      if (!(s.alpha >= 0)) throw ConfigError(f + ".alpha", "must be >= 0");
    }
    if (!initial_dedicated.empty()) {
      if (initial_dedicated.size() != slices.size()) {
        throw ConfigError("initial_dedicated", "one entry per slice");
      }
      for (int d : initial_dedicated) {
        if (d < 0) throw ConfigError("initial_dedicated", "counts must be >= 0");
      }
      const int sum = std::accumulate(initial_dedicated.begin(), initial_dedicated.end(), 0);
      if (sum + initial_common != num_rbs()) {
        throw ConfigError("initial_dedicated",
                          "dedicated RBs plus common RBs must sum to W (" +
                              std::to_string(sum) + " + " + std::to_string(initial_common) +
                              " != " + std::to_string(num_rbs()) + ")");
      }
    } else if (initial_common > num_rbs()) {
      throw ConfigError("initial_common", "exceeds W");
    }
    initial_allocation();  // throws if the floor cannot be met
  }
};

using SlicingAction = std::vector<int>;  // per-slice RB delta

// Joint index <-> per-slice deltas; slice 0 is the most significant digit.
inline SlicingAction decode_action(int index, const EnvConfig& cfg) {
  if (index < 0 || index >= cfg.num_actions()) throw UsageError("action index out of range");
  const int n = static_cast<int>(cfg.action_set.size());
  SlicingAction deltas(cfg.num_slices());
  for (int m = cfg.num_slices() - 1; m >= 0; --m) {
    deltas[m] = cfg.action_set[index % n];
    index /= n;
  }
  return deltas;
}

inline int encode_action(std::span<const int> deltas, const EnvConfig& cfg) {
  if (static_cast<int>(deltas.size()) != cfg.num_slices()) throw UsageError("action length mismatch");
  int index = 0;
  for (int d : deltas) {
    auto it = std::find(cfg.action_set.begin(), cfg.action_set.end(), d);
    if (it == cfg.action_set.end()) throw UsageError("delta not in the action set");
    index = index * static_cast<int>(cfg.action_set.size()) +
            static_cast<int>(it - cfg.action_set.begin());
  }
  return index;
}

inline int noop_action(const EnvConfig& cfg) {
  return encode_action(SlicingAction(cfg.num_slices(), 0), cfg);
}

struct ActionOutcome {
  Allocation allocation;
  SlicingAction applied;  // deltas after projection
  bool projected = false;
};

// w_m += delta_m, common -= sum(delta). Deltas that would push their slice below
// `floor` are zeroed; if the common pool would go negative, positive deltas are
// zeroed largest first (lower slice index on ties) until it is not.
inline ActionOutcome apply_action(const Allocation& alloc, std::span<const int> deltas, int floor) {
  if (deltas.size() != alloc.dedicated.size()) throw UsageError("action length mismatch");
  ActionOutcome out{alloc, SlicingAction(deltas.begin(), deltas.end()), false};
  auto& d = out.applied;
  for (std::size_t m = 0; m < d.size(); ++m) {
    if (alloc.dedicated[m] + d[m] < floor && d[m] < 0) {
      d[m] = 0;
      out.projected = true;
    }
  }
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  auto net = [&] { return std::accumulate(d.begin(), d.end(), 0); };
  for (std::size_t k = 0; k < order.size() && alloc.common - net() < 0; ++k) {
    if (d[order[k]] > 0) {
      d[order[k]] = 0;
      out.projected = true;
    }
  }
  for (std::size_t m = 0; m < d.size(); ++m) out.allocation.dedicated[m] += d[m];
  out.allocation.common -= net();
  SLICESIM_INVARIANT(out.allocation.total() == alloc.total(), "RB total preserved by action");
  SLICESIM_INVARIANT(out.allocation.common >= 0, "common pool nonnegative");
  return out;
}

// Agent-facing state: per slice (w/W, Q, o, mu).
using Observation = std::vector<double>;

// Everything that happened in one TTI, for audits and event-log recounts.
struct TtiRecord {
  Tti tti = 0;
  Allocation allocation;
  std::vector<std::vector<RbGrant>> grants;        // [slice] -> per-UE grants
  std::vector<int> common_share;                   // [slice] pool split from share_common
  std::vector<std::vector<double>> served_bits;    // [slice][ue]
  std::vector<std::vector<Packet>> delivered;      // [slice]
  std::vector<std::vector<Packet>> dropped;        // [slice]
};

struct StepResult {
  Observation observation;
  double reward = 0;
  EpochStats stats;
  Allocation allocation;  // the allocation the epoch ran with
  SlicingAction requested;
  SlicingAction applied;
  bool projected = false;
  bool terminal = false;
};

inline Observation make_observation(const EpochStats& stats, int num_rbs) {
  Observation obs;
  obs.reserve(4 * stats.slices.size());
  for (const auto& s : stats.slices) {
    obs.push_back(static_cast<double>(s.dedicated_rbs) / num_rbs);
    obs.push_back(s.q_sla);
    obs.push_back(s.isolation);
    obs.push_back(s.utilization);
  }
  return obs;
}

// sum_m alpha_m e^Q_m + beta prod_m 1(Q_m >= Q_m^th) S/S_max - rho sum_m [o_m^th - o_m]^+
inline double reward(const EpochStats& stats, const EnvConfig& cfg) {
  double r = 0;
  double penalty = 0;
  bool all_ok = true;
  for (std::size_t m = 0; m < stats.slices.size(); ++m) {
    const auto& s = stats.slices[m];
    const auto& sc = cfg.slices[m];
    r += sc.alpha * std::exp(s.q_sla);
    if (s.q_sla < sc.sla.q_threshold) all_ok = false;
    penalty += std::max(0.0, sc.isolation_threshold - s.isolation);
  }
  if (all_ok) r += cfg.beta * stats.spectral_eff_norm;
  return r - cfg.rho * penalty;
}

class SlicingEnv {
 public:
  using TtiObserver = std::function<void(const TtiRecord&)>;

  explicit SlicingEnv(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  const EnvConfig& config() const { return cfg_; }
  const Allocation& allocation() const { return alloc_; }
  int epoch() const { return epoch_; }
  bool terminal() const { return epoch_ >= cfg_.epochs_per_episode; }
  double s_max() const { return s_max_; }
  const EpochStats& last_stats() const { return last_stats_; }

  // Called after every simulated TTI, warm-up included.
  void set_tti_observer(TtiObserver obs) { observer_ = std::move(obs); }

  // Places UEs, clears queues, calibrates S_max and runs one warm-up epoch at
  // the initial allocation. `initial` overrides the configured allocation.
  Observation reset(std::uint64_t seed, std::optional<Allocation> initial = std::nullopt) {
    alloc_ = initial ? *initial : cfg_.initial_allocation();
    if (static_cast<int>(alloc_.dedicated.size()) != cfg_.num_slices() ||
        alloc_.total() != cfg_.num_rbs() || alloc_.common < 0 ||
        std::any_of(alloc_.dedicated.begin(), alloc_.dedicated.end(), [](int d) { return d < 0; })) {
      throw ConfigError("initial_allocation", "infeasible: " + alloc_.to_string());
    }
    if (!cfg_.hybrid && alloc_.common != 0) {
      throw ConfigError("initial_allocation", "common pool must be empty with hybrid off");
    }

    std::mt19937_64 placement(derive_seed(seed, 0));
    traffic_rng_.seed(derive_seed(seed, 1));
    const int total_ues = std::accumulate(cfg_.slices.begin(), cfg_.slices.end(), 0,
                                          [](int a, const SliceConfig& s) { return a + s.num_ues; });
    auto links = Channel::place_ues(total_ues, cfg_.cell_side_m, cfg_.channel.shadowing_std_db, placement);
    channel_ = Channel(cfg_.channel, links, derive_seed(seed, 2));
    s_max_ = calibrate_s_max(Channel(cfg_.channel, links, derive_seed(seed, 3)));

    slices_.clear();
    int offset = 0;
    for (const auto& sc : cfg_.slices) {
      SliceRuntime rt;
      rt.first_ue = offset;
      offset += sc.num_ues;
      for (int u = 0; u < sc.num_ues; ++u) rt.queues.emplace_back(u);
      rt.pf = PfTracker(sc.num_ues, cfg_.pf_window);
      rt.phase.assign(sc.num_ues, 0);
      if (sc.random_phase && sc.traffic.kind == TrafficKind::kPeriodic) {
        std::uniform_int_distribution<Tti> ph(0, sc.traffic.period_ttis(cfg_.channel.tti_s) - 1);
        for (auto& p : rt.phase) p = ph(placement);
      }
      if (sc.sla.kind == SlaKind::kDelayReliability) {
        rt.max_delay = max_delay_ttis(sc.sla.d_max_s, cfg_.channel.tti_s);
      }
      slices_.push_back(std::move(rt));
    }
    tti_ = 0;
    next_packet_id_ = 0;
    epoch_ = 0;
    last_stats_ = run_epoch();
    return make_observation(last_stats_, cfg_.num_rbs());
  }

  StepResult step(int action_index) { return step(decode_action(action_index, cfg_)); }

  StepResult step(const SlicingAction& deltas) {
    if (slices_.empty() && cfg_.num_slices() > 0) throw UsageError("step before reset");
    if (terminal()) throw UsageError("step after terminal epoch");
    auto outcome = apply_action(alloc_, deltas, cfg_.min_dedicated);
    alloc_ = outcome.allocation;
    last_stats_ = run_epoch();
    ++epoch_;
    StepResult r;
    r.observation = make_observation(last_stats_, cfg_.num_rbs());
    r.reward = last_stats_.reward;
    r.stats = last_stats_;
    r.allocation = alloc_;
    r.requested = deltas;
    r.applied = outcome.applied;
    r.projected = outcome.projected;
    r.terminal = terminal();
    return r;
  }

 private:
  struct SliceRuntime {
    int first_ue = 0;
    std::vector<UeQueue> queues;
    PfTracker pf;
    std::vector<Tti> phase;
    Tti max_delay = 0;  // 0: no deadline
  };

  struct EpochAccumulator {
    std::vector<std::vector<double>> ue_bits;
    std::vector<double> dedicated_granted;
    std::vector<double> common_granted;
    double total_bits = 0;
  };

  // Upper reference for S: all W RBs to the best-SINR UE every TTI, one epoch.
  double calibrate_s_max(Channel probe) const {
    if (probe.links().empty()) return 0.0;
    double bits = 0;
    for (int t = 0; t < cfg_.ttis_per_epoch; ++t) {
      probe.advance_tti();
      double best = 0;
      for (const auto& l : probe.links()) best = std::max(best, l.sinr);
      bits += rate_long(cfg_.num_rbs(), best, cfg_.channel);
    }
    return bits / cfg_.num_rbs();
  }

  double per_rb_bits(const SliceConfig& sc, double sinr_value) const {
    return sc.short_packets ? rate_short_for_allocation(1, sinr_value, sc.error_prob, cfg_.channel)
                            : rate_long(1, sinr_value, cfg_.channel);
  }

  double capacity_bits(const SliceConfig& sc, int rbs, double sinr_value) const {
    return sc.short_packets ? rate_short_for_allocation(rbs, sinr_value, sc.error_prob, cfg_.channel)
                            : rate_long(rbs, sinr_value, cfg_.channel);
  }

  // Runs one scheduling pass of the slice's own discipline over `rbs` RBs, with
  // `already` bits of capacity per UE consumed by an earlier pass.
  std::vector<UeRbs> schedule_pass(std::size_t m, int rbs, std::span<const double> per_rb,
                                   std::span<const double> already) const {
    const auto& sc = cfg_.slices[m];
    const auto& rt = slices_[m];
    if (rbs <= 0) return {};
    if (sc.scheduler == SchedulerKind::kProportionalFair) {
      std::vector<PfCandidate> cands;
      for (int u = 0; u < sc.num_ues; ++u) {
        const double need = rt.queues[u].queued_bits() - already[u];
        if (need > 1e-9) cands.push_back({u, per_rb[u], need});
      }
      return pf_schedule(cands, rbs, rt.pf);
    }
    std::vector<EdfCandidate> cands;
    for (int u = 0; u < sc.num_ues; ++u) {
      const auto& q = rt.queues[u];
      if (q.empty()) continue;
      EdfCandidate c{u, per_rb[u], {}};
      double skip = already[u];
      for (const auto& p : q.packets()) {
        const double left = p.remaining - std::min(skip, p.remaining);
        skip -= std::min(skip, p.remaining);
        const Tti dl = rt.max_delay > 0 ? deadline_tti(p, rt.max_delay) : p.arrival_tti;
        if (left > 1e-9) c.packets.push_back({dl, left});
      }
      if (!c.packets.empty()) cands.push_back(std::move(c));
    }
    return edf_schedule(cands, rbs);
  }

  void simulate_tti(EpochAccumulator& acc) {
    const int M = cfg_.num_slices();
    const double dt = cfg_.channel.tti_s;
    channel_.advance_tti();

    TtiRecord rec;
    rec.tti = tti_;
    rec.allocation = alloc_;
    rec.grants.resize(M);
    rec.served_bits.resize(M);
    rec.delivered.resize(M);
    rec.dropped.resize(M);

    for (int m = 0; m < M; ++m) {
      auto& rt = slices_[m];
      const auto& sc = cfg_.slices[m];
      for (int u = 0; u < sc.num_ues; ++u) {
        for (auto& p : generate_arrivals(sc.traffic, u, tti_, dt, traffic_rng_, next_packet_id_, rt.phase[u])) {
          rt.queues[u].push(std::move(p));
        }
      }
      if (rt.max_delay > 0) {
        for (auto& q : rt.queues) {
          for (auto& p : q.expire(tti_, rt.max_delay)) rec.dropped[m].push_back(std::move(p));
        }
      }
    }

    // Dedicated pools.
    std::vector<std::vector<double>> per_rb(M), ded_capacity(M);
    std::vector<std::vector<int>> ded(M), com(M);
    std::vector<SliceDemand> demands(M);
    for (int m = 0; m < M; ++m) {
      const auto& sc = cfg_.slices[m];
      per_rb[m].resize(sc.num_ues);
      for (int u = 0; u < sc.num_ues; ++u) {
        per_rb[m][u] = per_rb_bits(sc, channel_.link(slices_[m].first_ue + u).sinr);
      }
      ded[m].assign(sc.num_ues, 0);
      com[m].assign(sc.num_ues, 0);
      ded_capacity[m].assign(sc.num_ues, 0.0);
      for (const auto& g : schedule_pass(m, alloc_.dedicated[m], per_rb[m], ded_capacity[m])) {
        ded[m][g.ue_id] = g.rbs;
      }
      int residual = 0;
      for (int u = 0; u < sc.num_ues; ++u) {
        ded_capacity[m][u] = ded[m][u] * per_rb[m][u];
        residual += rbs_needed(slices_[m].queues[u].queued_bits() - ded_capacity[m][u], per_rb[m][u]);
      }
      demands[m] = {sc.priority, residual};
    }

    // Common pool.
    rec.common_share = cfg_.hybrid ? share_common(alloc_.common, demands) : std::vector<int>(M, 0);
    for (int m = 0; m < M; ++m) {
      for (const auto& g : schedule_pass(m, rec.common_share[m], per_rb[m], ded_capacity[m])) {
        com[m][g.ue_id] = g.rbs;
      }
    }

    // Transmission.
    int ded_total_all = 0, com_total_all = 0;
    for (int m = 0; m < M; ++m) {
      auto& rt = slices_[m];
      const auto& sc = cfg_.slices[m];
      rec.served_bits[m].assign(sc.num_ues, 0.0);
      int ded_sum = 0, com_sum = 0;
      for (int u = 0; u < sc.num_ues; ++u) {
        const int total = ded[m][u] + com[m][u];
        if (total > 0) rec.grants[m].push_back({u, ded[m][u], com[m][u]});
        ded_sum += ded[m][u];
        com_sum += com[m][u];
        if (total == 0) continue;
        const double budget = capacity_bits(sc, total, channel_.link(rt.first_ue + u).sinr);
        auto served = rt.queues[u].serve(budget, tti_);
        rec.served_bits[m][u] = served.bits;
        acc.ue_bits[m][u] += served.bits;
        acc.total_bits += served.bits;
        for (auto& p : served.delivered) rec.delivered[m].push_back(std::move(p));
      }
      SLICESIM_INVARIANT(ded_sum <= alloc_.dedicated[m], "dedicated grants within slice pool");
      SLICESIM_INVARIANT(com_sum <= rec.common_share[m], "common grants within slice share");
      acc.dedicated_granted[m] += ded_sum;
      acc.common_granted[m] += com_sum;
      ded_total_all += ded_sum;
      com_total_all += com_sum;
      if (sc.scheduler == SchedulerKind::kProportionalFair) rt.pf.update(rec.served_bits[m]);
    }
    SLICESIM_INVARIANT(com_total_all <= alloc_.common, "common grants within common pool");
    SLICESIM_INVARIANT(ded_total_all + com_total_all <= cfg_.num_rbs(), "RB conservation");
    SLICESIM_INVARIANT(cfg_.hybrid || com_total_all == 0, "no common use with hybrid off");

    if (observer_) observer_(rec);
    ++tti_;
  }

  EpochStats run_epoch() {
    const int M = cfg_.num_slices();
    const int T = cfg_.ttis_per_epoch;
    SLICESIM_INVARIANT(alloc_.total() == cfg_.num_rbs(), "sum of pools equals W");
    EpochAccumulator acc;
    acc.ue_bits.resize(M);
    for (int m = 0; m < M; ++m) {
      acc.ue_bits[m].assign(cfg_.slices[m].num_ues, 0.0);
      for (auto& q : slices_[m].queues) q.begin_epoch();
    }
    acc.dedicated_granted.assign(M, 0.0);
    acc.common_granted.assign(M, 0.0);

    for (int t = 0; t < T; ++t) simulate_tti(acc);

    EpochStats stats;
    stats.common_rbs = alloc_.common;
    std::vector<double> q, alphas, thresholds;
    for (int m = 0; m < M; ++m) {
      const auto& sc = cfg_.slices[m];
      SliceEpochStats s;
      s.name = sc.name;
      s.dedicated_rbs = alloc_.dedicated[m];
      s.common_used = acc.common_granted[m] / T;
      s.bits = std::accumulate(acc.ue_bits[m].begin(), acc.ue_bits[m].end(), 0.0);
      std::vector<ResolvedCounts> counts;
      for (const auto& qu : slices_[m].queues) {
        SLICESIM_INVARIANT(qu.carried_in() + qu.arrived() == qu.delivered() + qu.dropped() + qu.in_queue(),
                           "packet conservation per UE");
        counts.push_back({qu.delivered(), qu.dropped()});
        s.delivered += qu.delivered();
        s.dropped += qu.dropped();
      }
      s.q_sla = sc.sla.kind == SlaKind::kThroughput
                    ? q_rate(acc.ue_bits[m], sc.sla.rate_threshold_bps, T, cfg_.channel.tti_s)
                    : q_delay(counts);
      s.isolation = isolation(s.dedicated_rbs, s.common_used);
      s.utilization = utilization(acc.dedicated_granted[m], s.dedicated_rbs, T);
      q.push_back(s.q_sla);
      alphas.push_back(sc.alpha);
      thresholds.push_back(sc.sla.q_threshold);
      stats.slices.push_back(std::move(s));
    }
    const auto se = spectral_efficiency(acc.total_bits, cfg_.num_rbs(), s_max_);
    stats.spectral_eff = se.raw;
    stats.spectral_eff_norm = se.normalized;
    stats.utility = utility(q, se.raw, alphas, cfg_.beta, thresholds);
    stats.reward = reward(stats, cfg_);
    return stats;
  }

  EnvConfig cfg_;
  Allocation alloc_;
  Channel channel_;
  std::vector<SliceRuntime> slices_;
  std::mt19937_64 traffic_rng_;
  std::uint64_t next_packet_id_ = 0;
  Tti tti_ = 0;
  int epoch_ = 0;
  double s_max_ = 0;
  EpochStats last_stats_;
  TtiObserver observer_;
};

}  // namespace slicesim
