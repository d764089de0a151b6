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

// Comparison allocators: static NVS slicing, the purely hard DQN setup, and
// the exhaustive-search static oracle.

#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "slicesim/allocation.hpp"
#include "slicesim/env.hpp"

namespace slicesim {

// Runs one full episode at a constant allocation (no-op action every epoch).
inline std::vector<StepResult> run_static_episode(const EnvConfig& cfg, const Allocation& alloc,
                                                  std::uint64_t seed) {
  SlicingEnv env(cfg);
  env.reset(seed, alloc);
  const int noop = noop_action(cfg);
  std::vector<StepResult> out;
  out.reserve(cfg.epochs_per_episode);
  while (!env.terminal()) out.push_back(env.step(noop));
  return out;
}

// The same scenario with the common slice disabled: its RBs go back to the
// dedicated pools in proportion to the initial split.
inline EnvConfig hard_dqn_config(const EnvConfig& base) {
  EnvConfig hard = base;
  const Allocation init = base.initial_allocation();
  hard.hybrid = false;
  hard.initial_common = 0;
  if (init.common == 0) {
    hard.initial_dedicated = init.dedicated;
    return hard;
  }
  std::vector<double> w(init.dedicated.begin(), init.dedicated.end());
  if (std::accumulate(w.begin(), w.end(), 0.0) <= 0) w.assign(w.size(), 1.0);
  const auto extra = largest_remainder(w, init.common);
  hard.initial_dedicated = init.dedicated;
  for (std::size_t m = 0; m < extra.size(); ++m) hard.initial_dedicated[m] += extra[m];
  return hard;
}

struct SearchGrid {
  int step = 5;
  std::vector<Allocation> candidates;

  // Every (w_1..w_M) in multiples of `step` with sum <= W; the common pool
  // takes the rest, so each candidate satisfies sum + common = W.
  static SearchGrid full(int num_rbs, int num_slices, int step) {
    if (step < 1) throw InputError("grid step must be >= 1");
    if (num_slices < 1) throw InputError("need at least one slice");
    SearchGrid g;
    g.step = step;
    std::vector<int> cur(num_slices, 0);
    std::function<void(int, int)> rec = [&](int m, int used) {
      if (m == num_slices) {
        g.candidates.push_back({cur, num_rbs - used});
        return;
      }
      for (int w = 0; used + w <= num_rbs; w += step) {
        cur[m] = w;
        rec(m + 1, used + w);
      }
    };
    rec(0, 0);
    return g;
  }
};

struct OpAuditRow {
  std::size_t candidate = 0;
  Allocation allocation;
  std::uint64_t seed = 0;
  double utility = 0;  // mean epoch utility over the episode
  double reward = 0;   // mean reward over the episode
};

struct OpResult {
  std::size_t best_index = 0;
  Allocation best;
  double best_utility = 0;
  double best_reward = 0;
  std::vector<double> candidate_utility;  // mean over seeds
  std::vector<double> candidate_reward;
  std::vector<OpAuditRow> audit;
};

// True when candidate a should beat b at equal utility: larger common pool,
// then lexicographically smaller dedicated vector.
inline bool op_tie_prefers(const Allocation& a, const Allocation& b) {
  if (a.common != b.common) return a.common > b.common;
  return a.dedicated < b.dedicated;
}

inline OpResult op_search(const EnvConfig& cfg, const SearchGrid& grid,
                          std::span<const std::uint64_t> seeds) {
  if (grid.candidates.empty()) throw UsageError("empty search grid");
  if (seeds.empty()) throw UsageError("op_search needs at least one seed");
  OpResult r;
  for (std::size_t c = 0; c < grid.candidates.size(); ++c) {
    const auto& alloc = grid.candidates[c];
    double u_sum = 0, r_sum = 0;
    for (std::uint64_t seed : seeds) {
      const auto steps = run_static_episode(cfg, alloc, seed);
      double u = 0, rw = 0;
      for (const auto& s : steps) {
        u += s.stats.utility;
        rw += s.reward;
      }
      u /= static_cast<double>(steps.size());
      rw /= static_cast<double>(steps.size());
      r.audit.push_back({c, alloc, seed, u, rw});
      u_sum += u;
      r_sum += rw;
    }
    r.candidate_utility.push_back(u_sum / static_cast<double>(seeds.size()));
    r.candidate_reward.push_back(r_sum / static_cast<double>(seeds.size()));
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < grid.candidates.size(); ++c) {
    const double uc = r.candidate_utility[c], ub = r.candidate_utility[best];
    if (uc > ub || (uc == ub && op_tie_prefers(grid.candidates[c], grid.candidates[best]))) best = c;
  }
  r.best_index = best;
  r.best = grid.candidates[best];
  r.best_utility = r.candidate_utility[best];
  r.best_reward = r.candidate_reward[best];
  return r;
}

}  // namespace slicesim
