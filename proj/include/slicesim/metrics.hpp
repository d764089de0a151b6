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

// Epoch-level SLA scores, isolation, utilization, spectral efficiency and utility.

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slicesim/error.hpp"

namespace slicesim {

enum class SlaKind { kThroughput, kDelayReliability };

struct SlaTarget {
  SlaKind kind = SlaKind::kThroughput;
  double rate_threshold_bps = 5e6;  // throughput kind
  double d_max_s = 5e-3;            // delay-reliability kind
  double reliability_target = 0.9999;
  double q_threshold = 0.95;  // Q_m >= this counts as satisfied

  void validate() const {
    if (kind == SlaKind::kThroughput && !(rate_threshold_bps > 0)) {
      throw InputError("rate_threshold must be > 0");
    }
    if (kind == SlaKind::kDelayReliability) {
      if (!(d_max_s > 0)) throw InputError("d_max must be > 0");
      if (!(reliability_target > 0 && reliability_target <= 1)) {
        throw InputError("reliability_target must lie in (0,1]");
      }
    }
    if (!(q_threshold > 0 && q_threshold <= 1)) throw InputError("q_threshold must lie in (0,1]");
  }
};

// Throughput satisfaction: mean over UEs of min(bits / (R_th T dt), 1).
// An empty slice is vacuously satisfied.
inline double q_rate(std::span<const double> ue_bits, double rate_threshold_bps, int ttis,
                     double tti_s) {
  if (ttis < 1) throw InputError("epoch length must be >= 1 TTI");
  if (ue_bits.empty()) return 1.0;
  const double per_epoch = rate_threshold_bps * ttis * tti_s;
  double sum = 0;
  for (double b : ue_bits) sum += std::min(b / per_epoch, 1.0);
  return sum / static_cast<double>(ue_bits.size());
}

struct ResolvedCounts {
  std::int64_t delivered = 0;  // within deadline
  std::int64_t dropped = 0;
};

// Reliability satisfaction: mean over UEs of delivered / (delivered + dropped).
// UEs with nothing resolved this epoch count as satisfied.
inline double q_delay(std::span<const ResolvedCounts> ues) {
  if (ues.empty()) return 1.0;
  double sum = 0;
  for (const auto& u : ues) {
    const auto resolved = u.delivered + u.dropped;
    sum += resolved == 0 ? 1.0 : static_cast<double>(u.delivered) / static_cast<double>(resolved);
  }
  return sum / static_cast<double>(ues.size());
}

// o = w_m / (w_m + w_cm); 1 when the slice has nothing at all.
inline double isolation(double dedicated_rbs, double common_used_rbs) {
  if (dedicated_rbs < 0 || common_used_rbs < 0) throw InputError("isolation inputs must be >= 0");
  const double total = dedicated_rbs + common_used_rbs;
  return total > 0 ? dedicated_rbs / total : 1.0;
}

struct SpectralEfficiency {
  double raw = 0;         // S_k = sum_t sum_n r_{n,t} / W
  double normalized = 0;  // S_k / S_max
};

inline SpectralEfficiency spectral_efficiency(double total_bits, int num_rbs, double s_max) {
  if (num_rbs < 1) throw InputError("num_rbs must be >= 1");
  SpectralEfficiency se;
  se.raw = total_bits / num_rbs;
  se.normalized = s_max > 0 ? se.raw / s_max : 0.0;
  return se;
}

// Fraction of the dedicated pool actually granted over the epoch.
// An empty pool wastes nothing, so it reports 1.
inline double utilization(double granted_rb_ttis, int dedicated_rbs, int ttis) {
  if (dedicated_rbs < 0) throw InputError("dedicated_rbs must be >= 0");
  if (dedicated_rbs == 0) return 1.0;
  return std::clamp(granted_rb_ttis / (static_cast<double>(dedicated_rbs) * ttis), 0.0, 1.0);
}

// 1 iff every slice meets its threshold.
inline bool all_satisfied(std::span<const double> q, std::span<const double> thresholds) {
  if (q.size() != thresholds.size()) throw UsageError("slice count mismatch");
  for (std::size_t m = 0; m < q.size(); ++m) {
    if (q[m] < thresholds[m]) return false;
  }
  return true;
}

// U = sum_m alpha_m Q_m + beta * prod_m 1(Q_m >= Q_m^th) * S_k
inline double utility(std::span<const double> q, double s_k, std::span<const double> alphas,
                      double beta, std::span<const double> thresholds) {
  if (q.size() != alphas.size()) throw UsageError("slice count mismatch");
  double u = 0;
  for (std::size_t m = 0; m < q.size(); ++m) u += alphas[m] * q[m];
  if (all_satisfied(q, thresholds)) u += beta * s_k;
  return u;
}

struct SliceEpochStats {
  std::string name;
  double q_sla = 1;
  double isolation = 1;
  double utilization = 1;
  int dedicated_rbs = 0;
  double common_used = 0;  // mean common RBs per TTI
  double bits = 0;         // bits served to this slice's UEs over the epoch
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
};

struct EpochStats {
  std::vector<SliceEpochStats> slices;
  int common_rbs = 0;
  double spectral_eff = 0;
  double spectral_eff_norm = 0;
  double utility = 0;
  double reward = 0;

  std::vector<double> q() const {
    std::vector<double> out;
    for (const auto& s : slices) out.push_back(s.q_sla);
    return out;
  }
  std::vector<double> isolations() const {
    std::vector<double> out;
    for (const auto& s : slices) out.push_back(s.isolation);
    return out;
  }
};

}  // namespace slicesim
