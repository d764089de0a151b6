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

// Downlink link budget and per-TTI achievable rates.
//
// Rates are expressed in bits per TTI. Long packets use the Shannon bound;
// short packets use the normal approximation of the finite-blocklength
// coding rate, which subtracts a dispersion penalty proportional to
// sqrt(C / l) * Q^-1(eps).

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "slicesim/error.hpp"

namespace slicesim {

enum class PathlossModel {
  kMacroUrban,  // PL(dB) = 128.1 + 37.6 log10(d_km)
};

enum class FadingModel {
  kNone,
  kRayleigh,  // power gain ~ Exp(1), redrawn every TTI
};

// OFDM symbols carried by one RB in one TTI: 12 subcarriers x 14 symbols.
inline constexpr int kSymbolsPerRb = 168;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct ChannelParams {
  double tx_power_w = dbm_to_watts(43.0);
  double rb_bandwidth_hz = 180e3;
  int num_rbs = 100;
  double noise_psd_w_per_hz = dbm_to_watts(-174.0);
  double tti_s = 1e-3;
  PathlossModel pathloss = PathlossModel::kMacroUrban;
  double shadowing_std_db = 8.0;
  FadingModel fading = FadingModel::kRayleigh;

  double total_bandwidth_hz() const { return num_rbs * rb_bandwidth_hz; }

  void validate() const {
    if (!(tx_power_w > 0)) throw InputError("tx_power must be > 0");
    if (!(rb_bandwidth_hz > 0)) throw InputError("rb_bandwidth must be > 0");
    if (num_rbs < 1) throw InputError("num_rbs must be >= 1");
    if (!(noise_psd_w_per_hz > 0)) throw InputError("noise_psd must be > 0");
    if (!(tti_s > 0)) throw InputError("tti_duration must be > 0");
    if (!(shadowing_std_db >= 0)) throw InputError("shadowing_std must be >= 0");
  }
};

struct LinkState {
  int ue_id = 0;
  double distance_m = 1.0;
  double shadowing_db = 0.0;
  double fading_gain = 1.0;
  double sinr = 0.0;
};

struct ShortPacketParams {
  double error_prob = 1e-5;
  double blocklength = kSymbolsPerRb;

  void validate() const {
    if (!(error_prob > 0 && error_prob < 1)) throw InputError("error_prob must lie in (0,1)");
    if (!(blocklength >= 1)) throw InputError("blocklength must be >= 1");
  }
};

inline double pathloss_db(double distance_m, PathlossModel model = PathlossModel::kMacroUrban) {
  if (!(distance_m >= 1.0)) throw InputError("pathloss distance must be >= 1 m");
  switch (model) {
    case PathlossModel::kMacroUrban:
      break;
  }
  // The model is only nonnegative for d >= ~0.4 m, which the precondition covers.
  return 128.1 + 37.6 * std::log10(distance_m / 1000.0);
}

// Linear channel power gain H (pathloss + shadowing + small-scale fading).
inline double channel_gain(const LinkState& link, PathlossModel model = PathlossModel::kMacroUrban) {
  const double loss_db = pathloss_db(link.distance_m, model) + link.shadowing_db;
  return db_to_linear(-loss_db) * link.fading_gain;
}

// gamma = P H / (B_total N0), equal power over the whole band.
inline double sinr_from_gain(double gain, const ChannelParams& params) {
  return params.tx_power_w * gain / (params.total_bandwidth_hz() * params.noise_psd_w_per_hz);
}

inline double sinr(const LinkState& link, const ChannelParams& params) {
  return sinr_from_gain(channel_gain(link, params.pathloss), params);
}

// Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt 2).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace detail {

// Acklam's rational approximation of the standard normal quantile
// (relative error ~1.15e-9), used as the starting point for refinement.
inline double normal_quantile_guess(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p <= 1 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  }
  const double q = std::sqrt(-2 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
}

}  // namespace detail

// Inverse of the Gaussian Q-function: returns x with Q(x) = p.
inline double inverse_q(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("inverse_q requires p in (0,1)");
  if (p == 0.5) return 0.0;
  // Q^-1(p) = Phi^-1(1 - p) = -Phi^-1(p)
  double x = -detail::normal_quantile_guess(p);
  // Halley refinement on f(x) = Q(x) - p, f' = -phi(x), f'' = x phi(x).
  for (int i = 0; i < 3; ++i) {
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
    if (phi == 0.0) break;
    const double u = (q_function(x) - p) / -phi;  // f / f'
    x -= u / (1 + 0.5 * x * u);
  }
  return x;
}

// C = 1 - 1 / (1 + gamma)^2
inline double channel_dispersion(double sinr) {
  const double g = 1.0 + sinr;
  return 1.0 - 1.0 / (g * g);
}

inline double rate_long(int rbs, double sinr, const ChannelParams& params) {
  if (rbs <= 0) return 0.0;
  return params.tti_s * (rbs * params.rb_bandwidth_hz) * std::log2(1.0 + sinr);
}

// Finite-blocklength rate; negative values (penalty above Shannon term) clamp to 0.
inline double rate_short(int rbs, double sinr, const ShortPacketParams& sp,
                         const ChannelParams& params) {
  if (rbs <= 0) return 0.0;
  const double penalty = std::sqrt(channel_dispersion(sinr) / sp.blocklength) *
                         inverse_q(sp.error_prob) * std::numbers::log2e;
  const double per_hz = std::log2(1.0 + sinr) - penalty;
  if (per_hz <= 0.0) return 0.0;
  return params.tti_s * (rbs * params.rb_bandwidth_hz) * per_hz;
}

// Short-packet rate with the blocklength tied to the allocation (rbs x 168 symbols).
inline double rate_short_for_allocation(int rbs, double sinr, double error_prob,
                                        const ChannelParams& params) {
  if (rbs <= 0) return 0.0;
  return rate_short(rbs, sinr, ShortPacketParams{error_prob, double(rbs) * kSymbolsPerRb}, params);
}

// Owns the per-UE links of one cell and the RNG stream for small-scale fading.
class Channel {
 public:
  Channel() = default;
  Channel(ChannelParams params, std::vector<LinkState> links, std::uint64_t fading_seed)
      : params_(params), links_(std::move(links)), rng_(fading_seed) {
    params_.validate();
    refresh_sinr();
  }

  // Places `num_ues` uniformly in a square cell of side `cell_side_m` with the BS
  // at the center; shadowing is drawn once per UE.
  static std::vector<LinkState> place_ues(int num_ues, double cell_side_m, double shadowing_std_db,
                                          std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coord(-cell_side_m / 2, cell_side_m / 2);
    std::normal_distribution<double> shadow(0.0, shadowing_std_db);
    std::vector<LinkState> links;
    links.reserve(num_ues);
    for (int id = 0; id < num_ues; ++id) {
      double d = 0.0;
      do {
        d = std::hypot(coord(rng), coord(rng));
      } while (d < 1.0);
      links.push_back({id, d, shadowing_std_db > 0 ? shadow(rng) : 0.0, 1.0, 0.0});
    }
    return links;
  }

  // Redraws fading for the next TTI and recomputes every SINR.
  void advance_tti() {
    if (params_.fading == FadingModel::kRayleigh) {
      std::exponential_distribution<double> exp1(1.0);
      for (auto& l : links_) l.fading_gain = exp1(rng_);
    }
    refresh_sinr();
  }

  const ChannelParams& params() const { return params_; }
  std::span<const LinkState> links() const { return links_; }
  const LinkState& link(int ue) const { return links_.at(ue); }

 private:
  void refresh_sinr() {
    for (auto& l : links_) l.sinr = sinr(l, params_);
  }

  ChannelParams params_;
  std::vector<LinkState> links_;
  std::mt19937_64 rng_;
};

}  // namespace slicesim
