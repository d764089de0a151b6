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

// Packet arrivals and per-UE FCFS queues held at the base station.

#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "slicesim/error.hpp"

namespace slicesim {

using Tti = std::int64_t;

enum class TrafficKind { kPoisson, kPeriodic };

struct TrafficModel {
  TrafficKind kind = TrafficKind::kPoisson;
  double rate_pps = 100.0;
  double packet_bits = 55e3;

  void validate() const {
    if (!(rate_pps > 0)) throw InputError("traffic rate must be > 0");
    if (!(packet_bits > 0)) throw InputError("packet size must be > 0");
  }

  // Arrival period in TTIs for periodic traffic, at least 1.
  Tti period_ttis(double tti_s) const {
    return std::max<Tti>(1, std::llround(1.0 / (rate_pps * tti_s)));
  }
};

struct Packet {
  std::uint64_t id = 0;
  int ue_id = 0;
  double size = 0;
  Tti arrival_tti = 0;
  double remaining = 0;
  std::optional<Tti> delivered_tti;

  // Delay in TTIs, counting the delivery TTI itself.
  Tti delay_ttis() const { return *delivered_tti - arrival_tti + 1; }
};

// Converts a delay budget in seconds to whole TTIs.
inline Tti max_delay_ttis(double d_max_s, double tti_s) {
  if (!(d_max_s > 0)) throw InputError("d_max must be > 0");
  return std::max<Tti>(1, std::llround(d_max_s / tti_s));
}

// Last TTI at which a packet can still be delivered within its budget.
inline Tti deadline_tti(const Packet& p, Tti max_delay) { return p.arrival_tti + max_delay - 1; }

// Draws this TTI's arrivals for one UE. `phase` offsets periodic traffic;
// `next_id` is advanced for every packet created.
inline std::vector<Packet> generate_arrivals(const TrafficModel& model, int ue_id, Tti tti,
                                             double tti_s, std::mt19937_64& rng,
                                             std::uint64_t& next_id, Tti phase = 0) {
  std::vector<Packet> out;
  std::int64_t count = 0;
  if (model.kind == TrafficKind::kPoisson) {
    std::poisson_distribution<std::int64_t> arrivals(model.rate_pps * tti_s);
    count = arrivals(rng);
  } else {
    const Tti period = model.period_ttis(tti_s);
    count = ((tti - phase) % period + period) % period == 0 ? 1 : 0;
  }
  out.reserve(count);
  for (std::int64_t i = 0; i < count; ++i) {
    out.push_back({next_id++, ue_id, model.packet_bits, tti, model.packet_bits, std::nullopt});
  }
  return out;
}

struct ServeResult {
  double bits = 0;  // bits actually transmitted, including partial packets
  std::vector<Packet> delivered;
};

// FCFS queue for one UE with per-epoch counters.
class UeQueue {
 public:
  explicit UeQueue(int ue_id = 0) : ue_id_(ue_id) {}

  void push(Packet p) {
    if (!packets_.empty() && p.arrival_tti < packets_.back().arrival_tti) {
      throw UsageError("packets must be pushed in arrival order");
    }
    ++arrived_;
    packets_.push_back(std::move(p));
  }

  // Drains head-of-line packets with up to `budget` bits.
  ServeResult serve(double budget, Tti tti) {
    ServeResult r;
    while (budget > 0 && !packets_.empty()) {
      Packet& head = packets_.front();
      const double take = std::min(budget, head.remaining);
      head.remaining -= take;
      budget -= take;
      r.bits += take;
      // Sub-bit residue from floating point is treated as delivered.
      if (head.remaining <= 1e-9) {
        head.remaining = 0;
        head.delivered_tti = tti;
        r.delivered.push_back(std::move(head));
        packets_.pop_front();
        ++delivered_;
      }
    }
    return r;
  }

  // Removes packets whose delay at `tti` would exceed `max_delay` TTIs.
  std::vector<Packet> expire(Tti tti, Tti max_delay) {
    std::vector<Packet> dropped;
    // FCFS order means expired packets form a prefix.
    while (!packets_.empty() && tti - packets_.front().arrival_tti + 1 > max_delay) {
      dropped.push_back(std::move(packets_.front()));
      packets_.pop_front();
      ++dropped_;
    }
    return dropped;
  }

  void begin_epoch() {
    carried_in_ = static_cast<std::int64_t>(packets_.size());
    arrived_ = delivered_ = dropped_ = 0;
  }

  double queued_bits() const {
    double s = 0;
    for (const auto& p : packets_) s += p.remaining;
    return s;
  }

  int ue_id() const { return ue_id_; }
  bool empty() const { return packets_.empty(); }
  const std::deque<Packet>& packets() const { return packets_; }
  std::int64_t arrived() const { return arrived_; }
  std::int64_t delivered() const { return delivered_; }
  std::int64_t dropped() const { return dropped_; }
  std::int64_t carried_in() const { return carried_in_; }
  std::int64_t in_queue() const { return static_cast<std::int64_t>(packets_.size()); }

 private:
  int ue_id_;
  std::deque<Packet> packets_;
  std::int64_t arrived_ = 0, delivered_ = 0, dropped_ = 0, carried_in_ = 0;
};

}  // namespace slicesim
