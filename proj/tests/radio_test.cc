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

#include "slicesim/radio.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

namespace slicesim {
namespace {

TEST(Pathloss, ReferenceDistances) {
  EXPECT_NEAR(pathloss_db(1000.0), 128.1, 1e-12);
  EXPECT_NEAR(pathloss_db(100.0), 90.5, 1e-12);
  EXPECT_THROW(pathloss_db(0.5), InputError);
}

TEST(Pathloss, MonotoneInDistance) {
  double prev = pathloss_db(1.0);
  for (double d = 2.0; d < 2000.0; d *= 1.3) {
    const double pl = pathloss_db(d);
    EXPECT_GT(pl, prev);
    prev = pl;
  }
}

TEST(Sinr, FullBandExample) {
  ChannelParams p;  // 43 dBm over 100 x 180 kHz at -174 dBm/Hz
  // 19.953 W * 1e-12 / (18e6 Hz * 3.981e-21 W/Hz)
  const double expected = dbm_to_watts(43.0) * 1e-12 / (18e6 * std::pow(10.0, -20.4));
  EXPECT_NEAR(sinr_from_gain(1e-12, p), expected, 1e-9 * expected);
  EXPECT_NEAR(sinr_from_gain(1e-12, p), 278.44, 0.01);
}

TEST(Sinr, CombinesPathlossShadowingFading) {
  ChannelParams p;
  LinkState l{0, 100.0, 3.0, 0.5, 0.0};
  const double gain = std::pow(10.0, -(90.5 + 3.0) / 10.0) * 0.5;
  EXPECT_NEAR(sinr(l, p), sinr_from_gain(gain, p), 1e-9 * sinr(l, p));
}

TEST(InverseQ, MatchesBisectionAtTargetError) {
  const double oracle = testing::bisect_inverse_q(1e-5);
  EXPECT_NEAR(oracle, 4.264891, 1e-5);
  EXPECT_NEAR(inverse_q(1e-5), oracle, 1e-9);
}

TEST(InverseQ, Symmetry) {
  EXPECT_EQ(inverse_q(0.5), 0.0);
  // 1 - p must be exact in binary, hence the power of two for the deep tail.
  for (double p : {0x1p-40, 1e-7, 1e-3, 0.1, 0.3, 0.49}) {
    EXPECT_NEAR(inverse_q(1 - p), -inverse_q(p), 1e-8) << p;
  }
}

TEST(InverseQ, RoundTripGrid) {
  for (double lg = -14; lg <= -0.31; lg += 0.25) {
    const double p = std::pow(10.0, lg);
    EXPECT_NEAR(q_function(inverse_q(p)) / p, 1.0, 1e-8) << p;
    EXPECT_NEAR(inverse_q(p), testing::bisect_inverse_q(p), 1e-8) << p;
  }
}

TEST(InverseQ, RejectsOutOfDomain) {
  EXPECT_THROW(inverse_q(0.0), InputError);
  EXPECT_THROW(inverse_q(1.0), InputError);
  EXPECT_THROW(inverse_q(-0.1), InputError);
}

TEST(Dispersion, KnownValue) {
  EXPECT_DOUBLE_EQ(channel_dispersion(3.0), 0.9375);
  EXPECT_DOUBLE_EQ(channel_dispersion(0.0), 0.0);
}

TEST(Rates, LongPacketSingleRb) {
  ChannelParams p;
  EXPECT_NEAR(rate_long(1, 3.0, p), 360.0, 1e-9);
  EXPECT_EQ(rate_long(0, 3.0, p), 0.0);
}

TEST(Rates, ShortPacketSingleRb) {
  ChannelParams p;
  const double penalty = std::sqrt(0.9375 / 168.0) * testing::bisect_inverse_q(1e-5) / std::log(2.0);
  const double expected = 1e-3 * 180e3 * (2.0 - penalty);
  const double r = rate_short(1, 3.0, ShortPacketParams{1e-5, 168}, p);
  EXPECT_NEAR(r, expected, 1e-6);
  EXPECT_NEAR(r, 277.27, 0.01);
}

TEST(Rates, ShortEqualsLongAtHalfErrorProbability) {
  ChannelParams p;
  for (double g : {0.01, 1.0, 3.0, 1000.0}) {
    EXPECT_NEAR(rate_short(7, g, ShortPacketParams{0.5, 7 * 168.0}, p), rate_long(7, g, p), 1e-9);
  }
}

TEST(Rates, ShortClampsAtZero) {
  ChannelParams p;
  EXPECT_EQ(rate_short(1, 1e-4, ShortPacketParams{1e-9, 10}, p), 0.0);
}

TEST(Rates, ShortNeverExceedsLongProperty) {
  ChannelParams p;
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> log_sinr(-3.0, 4.0), log_eps(-12.0, std::log10(0.4999));
  std::uniform_int_distribution<int> rbs(1, 100);
  std::uniform_real_distribution<double> blk(1.0, 20000.0);
  for (int i = 0; i < 100000; ++i) {
    const double g = std::pow(10.0, log_sinr(rng));
    const int n = rbs(rng);
    const ShortPacketParams sp{std::pow(10.0, log_eps(rng)), blk(rng)};
    const double rs = rate_short(n, g, sp, p);
    ASSERT_LE(rs, rate_long(n, g, p)) << "sinr=" << g << " rbs=" << n;
    ASSERT_GE(rs, 0.0);
  }
}

TEST(Channel, PlacementIsSeededAndInsideTheCell) {
  std::mt19937_64 a(5), b(5);
  const auto la = Channel::place_ues(50, 500.0, 8.0, a);
  const auto lb = Channel::place_ues(50, 500.0, 8.0, b);
  ASSERT_EQ(la.size(), 50u);
  for (std::size_t i = 0; i < la.size(); ++i) {
    EXPECT_EQ(la[i].distance_m, lb[i].distance_m);
    EXPECT_EQ(la[i].shadowing_db, lb[i].shadowing_db);
    EXPECT_GE(la[i].distance_m, 1.0);
    EXPECT_LE(la[i].distance_m, 250.0 * std::sqrt(2.0));
  }
}

TEST(Channel, FadingRedrawnEachTtiShadowingFixed) {
  std::mt19937_64 rng(9);
  ChannelParams p;
  Channel ch(p, Channel::place_ues(3, 500.0, 8.0, rng), 77);
  ch.advance_tti();
  const auto first = std::vector<LinkState>(ch.links().begin(), ch.links().end());
  ch.advance_tti();
  for (int u = 0; u < 3; ++u) {
    EXPECT_EQ(ch.link(u).shadowing_db, first[u].shadowing_db);
    EXPECT_EQ(ch.link(u).distance_m, first[u].distance_m);
    EXPECT_NE(ch.link(u).fading_gain, first[u].fading_gain);
    EXPECT_GT(ch.link(u).sinr, 0.0);
  }
}

TEST(Channel, RayleighPowerHasUnitMean) {
  ChannelParams p;
  Channel ch(p, {LinkState{0, 100.0, 0.0, 1.0, 0.0}}, 3);
  double sum = 0;
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    ch.advance_tti();
    sum += ch.link(0).fading_gain;
  }
  EXPECT_NEAR(sum / n, 1.0, 5.0 / std::sqrt(n));  // Exp(1) has unit variance
}

}  // namespace
}  // namespace slicesim
