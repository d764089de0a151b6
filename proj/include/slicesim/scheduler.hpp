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

// Per-TTI intra-slice RB schedulers and the common-pool split.
//
// Every scheduler hands out whole RBs and never grants more than a UE needs
// to drain what it has queued. UE ids here are slice-local.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "slicesim/error.hpp"
#include "slicesim/traffic.hpp"

namespace slicesim {

enum class SchedulerKind { kProportionalFair, kEarliestDeadlineFirst };

struct RbGrant {
  int ue_id = 0;
  int rbs_dedicated = 0;
  int rbs_common = 0;

  int total() const { return rbs_dedicated + rbs_common; }
};

// RBs granted to one UE within a single scheduling pass.
struct UeRbs {
  int ue_id = 0;
  int rbs = 0;
};

// Whole RBs needed to carry `bits` at `per_rb_bits` each.
inline int rbs_needed(double bits, double per_rb_bits) {
  if (bits <= 0) return 0;
  if (per_rb_bits <= 0) return 0;  // unservable this TTI
  return static_cast<int>(std::ceil(bits / per_rb_bits - 1e-9));
}

// Exponentially averaged served rate per UE, the PF denominator.
class PfTracker {
 public:
  static constexpr double kDefaultWindow = 100.0;
  static constexpr double kFloor = 1.0;

  explicit PfTracker(int num_ues = 0, double window_ttis = kDefaultWindow)
      : avg_(num_ues, kFloor), window_(window_ttis) {}

  double avg_rate(int ue) const { return avg_.at(ue); }
  void set_avg_rate(int ue, double v) { avg_.at(ue) = std::max(kFloor, v); }
  int size() const { return static_cast<int>(avg_.size()); }

  // EMA update with factor 1/window; every UE is updated, unserved ones with 0.
  void update(std::span<const double> served_bits) {
    if (served_bits.size() != avg_.size()) throw UsageError("PF update size mismatch");
    const double a = 1.0 / window_;
    for (std::size_t i = 0; i < avg_.size(); ++i) {
      avg_[i] = std::max(kFloor, (1 - a) * avg_[i] + a * served_bits[i]);
    }
  }

 private:
  std::vector<double> avg_;
  double window_;
};

struct PfCandidate {
  int ue_id = 0;
  double per_rb_bits = 0;  // instantaneous rate of one RB
  double need_bits = 0;    // bits still queued for this pass
};

// Proportional fair: each RB goes to the UE maximizing per_rb / avg_rate among
// those that still need bits. Ties go to the lower ue_id.
inline std::vector<UeRbs> pf_schedule(std::span<const PfCandidate> ues, int rbs,
                                      const PfTracker& pf) {
  std::vector<UeRbs> grants;
  std::vector<double> need(ues.size());
  std::vector<int> given(ues.size(), 0);
  for (std::size_t i = 0; i < ues.size(); ++i) need[i] = ues[i].need_bits;

  for (int rb = 0; rb < rbs; ++rb) {
    int best = -1;
    double best_metric = 0;
    for (std::size_t i = 0; i < ues.size(); ++i) {
      if (need[i] <= 1e-9 || ues[i].per_rb_bits <= 0) continue;
      const double metric = ues[i].per_rb_bits / pf.avg_rate(ues[i].ue_id);
      if (best < 0 || metric > best_metric ||
          (metric == best_metric && ues[i].ue_id < ues[best].ue_id)) {
        best = static_cast<int>(i);
        best_metric = metric;
      }
    }
    if (best < 0) break;  // every queue covered
    ++given[best];
    need[best] -= ues[best].per_rb_bits;
  }
  for (std::size_t i = 0; i < ues.size(); ++i) {
    if (given[i] > 0) grants.push_back({ues[i].ue_id, given[i]});
  }
  std::sort(grants.begin(), grants.end(),
            [](const UeRbs& a, const UeRbs& b) { return a.ue_id < b.ue_id; });
  return grants;
}

struct PendingBits {
  Tti deadline = 0;
  double bits = 0;
};

struct EdfCandidate {
  int ue_id = 0;
  double per_rb_bits = 0;
  std::vector<PendingBits> packets;  // FCFS order
};

// Earliest deadline first at packet granularity: packets are taken in deadline
// order (ties by ue_id, then queue position) and each receives the extra RBs
// its UE needs to carry it, capped by what is left.
inline std::vector<UeRbs> edf_schedule(std::span<const EdfCandidate> ues, int rbs) {
  struct Item {
    Tti deadline;
    int ue_id;
    std::size_t pos;
    std::size_t cand;
  };
  std::vector<Item> items;
  for (std::size_t c = 0; c < ues.size(); ++c) {
    if (ues[c].per_rb_bits <= 0) continue;
    for (std::size_t p = 0; p < ues[c].packets.size(); ++p) {
      if (ues[c].packets[p].bits > 0) items.push_back({ues[c].packets[p].deadline, ues[c].ue_id, p, c});
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.deadline != b.deadline) return a.deadline < b.deadline;
    if (a.ue_id != b.ue_id) return a.ue_id < b.ue_id;
    return a.pos < b.pos;
  });

  std::vector<double> cum_bits(ues.size(), 0.0);
  std::vector<int> given(ues.size(), 0);
  int left = rbs;
  for (const Item& it : items) {
    if (left <= 0) break;
    const auto& cand = ues[it.cand];
    cum_bits[it.cand] += cand.packets[it.pos].bits;
    const int extra = rbs_needed(cum_bits[it.cand], cand.per_rb_bits) - given[it.cand];
    const int take = std::min(std::max(extra, 0), left);
    given[it.cand] += take;
    left -= take;
  }
  std::vector<UeRbs> grants;
  for (std::size_t c = 0; c < ues.size(); ++c) {
    if (given[c] > 0) grants.push_back({ues[c].ue_id, given[c]});
  }
  std::sort(grants.begin(), grants.end(),
            [](const UeRbs& a, const UeRbs& b) { return a.ue_id < b.ue_id; });
  return grants;
}

struct SliceDemand {
  int priority = 0;  // higher is served first
  int demand_rbs = 0;
};

// Greedy priority split of the common pool. Equal priorities keep input order.
inline std::vector<int> share_common(int common_rbs, std::span<const SliceDemand> demands) {
  if (common_rbs < 0) throw UsageError("common pool must be nonnegative");
  std::vector<std::size_t> order(demands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return demands[a].priority > demands[b].priority;
  });
  std::vector<int> out(demands.size(), 0);
  int left = common_rbs;
  for (std::size_t idx : order) {
    if (demands[idx].demand_rbs < 0) throw UsageError("demand must be nonnegative");
    out[idx] = std::min(demands[idx].demand_rbs, left);
    left -= out[idx];
  }
  return out;
}

}  // namespace slicesim
