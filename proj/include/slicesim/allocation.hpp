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

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "slicesim/error.hpp"

namespace slicesim {

// Epoch-level partition of the band: per-slice dedicated pools plus the common pool.
struct Allocation {
  std::vector<int> dedicated;
  int common = 0;

  int total() const { return std::accumulate(dedicated.begin(), dedicated.end(), 0) + common; }
  bool operator==(const Allocation&) const = default;

  std::string to_string() const {
    std::string s = "(";
    for (int d : dedicated) s += std::to_string(d) + ",";
    return s + " common " + std::to_string(common) + ")";
  }
};

// Splits `total` into integers proportional to `weights` (largest-remainder
// rounding, ties to the lower index). Sum is exactly `total`.
inline std::vector<int> largest_remainder(std::span<const double> weights, int total) {
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(wsum > 0)) throw InputError("weights must have a positive sum");
  std::vector<int> out(weights.size());
  std::vector<double> rem(weights.size());
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0) throw InputError("weights must be nonnegative");
    const double exact = weights[i] / wsum * total;
    out[i] = static_cast<int>(std::floor(exact));
    rem[i] = exact - out[i];
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[order[k % order.size()]];
  return out;
}

struct NvsWeights {
  std::vector<double> weights;

  // Normalizes to sum 1; rejects negative or all-zero weights.
  static NvsWeights normalized(std::vector<double> w) {
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double x : w) {
      if (x < 0) throw InputError("NVS weights must be nonnegative");
    }
    if (!(s > 0)) throw InputError("NVS weights must not all be zero");
    for (double& x : w) x /= s;
    return {std::move(w)};
  }
};

// Static weight-based slicing: every RB is dedicated, no common pool.
inline Allocation nvs_alloc(const NvsWeights& w, int num_rbs) {
  return {largest_remainder(w.weights, num_rbs), 0};
}

// Raises any slice below `floor` by taking RBs from the currently largest pool.
inline void enforce_floor(std::vector<int>& dedicated, int floor) {
  for (std::size_t m = 0; m < dedicated.size(); ++m) {
    while (dedicated[m] < floor) {
      auto donor = std::max_element(dedicated.begin(), dedicated.end());
      if (*donor <= floor) throw ConfigError("initial_allocation", "not enough RBs to honor the per-slice floor");
      --*donor;
      ++dedicated[m];
    }
  }
}

}  // namespace slicesim
