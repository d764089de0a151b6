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

// Experiment configuration: a JSON document layered over built-in profile
// defaults. Every key is optional; unknown keys are rejected. The fully
// resolved document is what gets echoed into run logs and hashed.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicesim/agent.hpp"
#include "slicesim/baselines.hpp"
#include "slicesim/env.hpp"
#include "slicesim/error.hpp"

namespace slicesim {

inline constexpr const char* kVersion = "0.1.0";

enum class Algorithm { kProposed, kHardDqn, kNvs, kOp };
enum class ScaleProfile { kPaper, kDesk };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kProposed: return "proposed";
    case Algorithm::kHardDqn: return "hard-dqn";
    case Algorithm::kNvs: return "nvs";
    case Algorithm::kOp: return "op";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "proposed") return Algorithm::kProposed;
  if (s == "hard-dqn") return Algorithm::kHardDqn;
  if (s == "nvs") return Algorithm::kNvs;
  if (s == "op") return Algorithm::kOp;
  throw ConfigError("algorithm", "unknown algorithm '" + s + "' (proposed|hard-dqn|nvs|op)");
}

inline std::string to_string(ScaleProfile p) { return p == ScaleProfile::kPaper ? "paper" : "desk"; }

inline ScaleProfile parse_profile(const std::string& s) {
  if (s == "paper") return ScaleProfile::kPaper;
  if (s == "desk") return ScaleProfile::kDesk;
  throw ConfigError("profile", "unknown profile '" + s + "' (paper|desk)");
}

struct OracleConfig {
  int grid_step = 5;
  std::vector<std::uint64_t> seeds = {101, 102, 103};
};

struct ExperimentConfig {
  ScaleProfile profile = ScaleProfile::kPaper;
  Algorithm algorithm = Algorithm::kProposed;
  EnvConfig scenario;
  TrainConfig train;
  OracleConfig oracle;
  std::vector<std::uint64_t> seeds = {1};
  std::vector<std::uint64_t> eval_seeds = {1001, 1002, 1003};
  std::string output_dir = "runs";
  nlohmann::json resolved;  // the merged document this was built from

  // Environment the selected algorithm runs in.
  EnvConfig algorithm_env() const {
    return algorithm == Algorithm::kHardDqn ? hard_dqn_config(scenario) : scenario;
  }
};

// 64-bit FNV-1a, used for config and scenario hashes.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Built-in defaults for a profile, as a JSON document.
inline nlohmann::json profile_defaults(ScaleProfile profile) {
  using nlohmann::json;
  const bool desk = profile == ScaleProfile::kDesk;
  json embb = {
      {"name", "eMBB"},
      {"num_ues", desk ? 4 : 20},
      {"traffic", {{"kind", "poisson"}, {"rate_pps", 100.0}, {"packet_bits", 55000.0}}},
      {"sla", {{"kind", "throughput"}, {"rate_threshold_bps", 5e6}, {"q_threshold", 0.95}}},
      {"scheduler", "pf"},
      {"short_packets", false},
      {"error_prob", 1e-5},
      {"alpha", 2.0},
      {"isolation_threshold", 0.8},
      {"priority", 0},
      {"random_phase", false},
  };
  json urllc = {
      {"name", "uRLLC"},
      {"num_ues", desk ? 10 : 50},
      {"traffic", {{"kind", "periodic"}, {"rate_pps", 100.0}, {"packet_bits", 256.0}}},
      {"sla",
       {{"kind", "delay-reliability"}, {"d_max_s", 5e-3}, {"reliability_target", 0.9999}, {"q_threshold", 0.99}}},
      {"scheduler", "edf"},
      {"short_packets", true},
      {"error_prob", 1e-5},
      {"alpha", 3.0},
      {"isolation_threshold", 0.9},
      {"priority", 1},
      {"random_phase", false},
  };
  json scenario = {
      {"num_rbs", desk ? 20 : 100},
      {"rb_bandwidth_hz", 180e3},
      {"tx_power_dbm", 43.0},
      {"noise_psd_dbm_per_hz", -174.0},
      {"tti_s", 1e-3},
      {"shadowing_std_db", 8.0},
      {"fading", "rayleigh"},
      {"cell_side_m", 500.0},
      {"ttis_per_epoch", desk ? 100 : 200},
      {"epochs_per_episode", desk ? 100 : 200},
      {"initial_common", desk ? 6 : 30},
      {"initial_dedicated", json::array()},
      {"nvs_weights", json::array()},
      {"beta", 5.0},
      {"rho", 10.0},
      {"hybrid", true},
      {"action_set", {-5, -2, 0, 2, 5}},
      {"min_dedicated", 1},
      {"pf_window", 100.0},
      {"slices", {embb, urllc}},
  };
  json train = {
      {"discount", 0.9},
      {"batch", 32},
      {"learning_rate", 1e-3},
      {"grad_clip", 10.0},
      {"epsilon_start", 1.0},
      {"epsilon_end", 0.05},
      {"epsilon_decay_fraction", 0.6},
      {"target_sync", 50},
      {"replay_capacity", 10000},
      {"hidden", {64, 64}},
      {"updates_per_epoch", 32},
      {"min_replay", 32},
      {"episodes", desk ? 10 : 5},
  };
  return json{
      {"profile", to_string(profile)},
      {"algorithm", "proposed"},
      {"seeds", {1}},
      {"eval_seeds", {1001, 1002, 1003}},
      {"output_dir", "runs"},
      {"scenario", scenario},
      {"train", train},
      {"oracle", {{"grid_step", desk ? 2 : 5}, {"seeds", {101, 102, 103}}}},
  };
}

namespace detail {

// Recursive merge where objects merge key-wise and the slices array merges by
// index. Keys absent from `base` are rejected.
inline void merge_into(nlohmann::json& base, const nlohmann::json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError(key, "unknown key");
    auto& dst = base[it.key()];
    if (dst.is_object() && it->is_object()) {
      merge_into(dst, *it, key);
    } else if (it.key() == "slices" && it->is_array()) {
      const auto defaults = dst;
      nlohmann::json merged = nlohmann::json::array();
      for (std::size_t i = 0; i < it->size(); ++i) {
        nlohmann::json s = i < defaults.size() ? defaults[i] : defaults.back();
        merge_into(s, (*it)[i], key + "[" + std::to_string(i) + "]");
        merged.push_back(std::move(s));
      }
      dst = std::move(merged);
    } else {
      dst = *it;
    }
  }
}

template <typename T>
T field(const nlohmann::json& j, const char* key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + key, std::string("wrong type: ") + e.what());
  }
}

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline SliceConfig parse_slice(const nlohmann::json& j, const std::string& p) {
  SliceConfig s;
  s.name = field<std::string>(j, "name", p);
  s.num_ues = field<int>(j, "num_ues", p);
  const auto& t = j.at("traffic");
  const auto kind = field<std::string>(t, "kind", p + "traffic.");
  if (kind == "poisson") {
    s.traffic.kind = TrafficKind::kPoisson;
  } else if (kind == "periodic") {
    s.traffic.kind = TrafficKind::kPeriodic;
  } else {
    throw ConfigError(p + "traffic.kind", "expected poisson|periodic");
  }
  s.traffic.rate_pps = field<double>(t, "rate_pps", p + "traffic.");
  s.traffic.packet_bits = field<double>(t, "packet_bits", p + "traffic.");
  const auto& sla = j.at("sla");
  const auto sk = field<std::string>(sla, "kind", p + "sla.");
  if (sk == "throughput") {
    s.sla.kind = SlaKind::kThroughput;
  } else if (sk == "delay-reliability") {
    s.sla.kind = SlaKind::kDelayReliability;
  } else {
    throw ConfigError(p + "sla.kind", "expected throughput|delay-reliability");
  }
  if (sla.contains("rate_threshold_bps")) s.sla.rate_threshold_bps = field<double>(sla, "rate_threshold_bps", p + "sla.");
  if (sla.contains("d_max_s")) s.sla.d_max_s = field<double>(sla, "d_max_s", p + "sla.");
  if (sla.contains("reliability_target")) s.sla.reliability_target = field<double>(sla, "reliability_target", p + "sla.");
  s.sla.q_threshold = field<double>(sla, "q_threshold", p + "sla.");
  const auto sched = field<std::string>(j, "scheduler", p);
  if (sched == "pf") {
    s.scheduler = SchedulerKind::kProportionalFair;
  } else if (sched == "edf") {
    s.scheduler = SchedulerKind::kEarliestDeadlineFirst;
  } else {
    throw ConfigError(p + "scheduler", "expected pf|edf");
  }
  s.short_packets = field<bool>(j, "short_packets", p);
  s.error_prob = field<double>(j, "error_prob", p);
  s.alpha = field<double>(j, "alpha", p);
  s.isolation_threshold = field<double>(j, "isolation_threshold", p);
  s.priority = field<int>(j, "priority", p);
  s.random_phase = field<bool>(j, "random_phase", p);
  return s;
}

inline EnvConfig parse_scenario(const nlohmann::json& j) {
  const std::string p = "scenario.";
  EnvConfig c;
  c.channel.num_rbs = field<int>(j, "num_rbs", p);
  c.channel.rb_bandwidth_hz = field<double>(j, "rb_bandwidth_hz", p);
  c.channel.tx_power_w = dbm_to_watts(field<double>(j, "tx_power_dbm", p));
  c.channel.noise_psd_w_per_hz = dbm_to_watts(field<double>(j, "noise_psd_dbm_per_hz", p));
  c.channel.tti_s = field<double>(j, "tti_s", p);
  c.channel.shadowing_std_db = field<double>(j, "shadowing_std_db", p);
  const auto fading = field<std::string>(j, "fading", p);
  if (fading == "rayleigh") {
    c.channel.fading = FadingModel::kRayleigh;
  } else if (fading == "none") {
    c.channel.fading = FadingModel::kNone;
  } else {
    throw ConfigError(p + "fading", "expected rayleigh|none");
  }
  c.cell_side_m = field<double>(j, "cell_side_m", p);
  c.ttis_per_epoch = field<int>(j, "ttis_per_epoch", p);
  c.epochs_per_episode = field<int>(j, "epochs_per_episode", p);
  c.initial_common = field<int>(j, "initial_common", p);
  c.initial_dedicated = field<std::vector<int>>(j, "initial_dedicated", p);
  c.nvs_weights = field<std::vector<double>>(j, "nvs_weights", p);
  c.beta = field<double>(j, "beta", p);
  c.rho = field<double>(j, "rho", p);
  c.hybrid = field<bool>(j, "hybrid", p);
  c.action_set = field<std::vector<int>>(j, "action_set", p);
  c.min_dedicated = field<int>(j, "min_dedicated", p);
  c.pf_window = field<double>(j, "pf_window", p);
  const auto& slices = j.at("slices");
  for (std::size_t i = 0; i < slices.size(); ++i) {
    c.slices.push_back(parse_slice(slices[i], p + "slices[" + std::to_string(i) + "]."));
  }
  return c;
}

inline TrainConfig parse_train(const nlohmann::json& j) {
  const std::string p = "train.";
  TrainConfig t;
  t.discount = field<double>(j, "discount", p);
  t.batch = field<int>(j, "batch", p);
  t.learning_rate = field<double>(j, "learning_rate", p);
  t.grad_clip = field<double>(j, "grad_clip", p);
  t.epsilon_start = field<double>(j, "epsilon_start", p);
  t.epsilon_end = field<double>(j, "epsilon_end", p);
  t.epsilon_decay_fraction = field<double>(j, "epsilon_decay_fraction", p);
  t.target_sync = field<int>(j, "target_sync", p);
  t.replay_capacity = field<int>(j, "replay_capacity", p);
  t.hidden = field<std::vector<int>>(j, "hidden", p);
  t.updates_per_epoch = field<int>(j, "updates_per_epoch", p);
  t.min_replay = field<int>(j, "min_replay", p);
  t.episodes = field<int>(j, "episodes", p);
  try {
    t.validate();
  } catch (const UsageError& e) {
    throw ConfigError("train", e.what());
  }
  return t;
}

}  // namespace detail

// Resolves `user` over the defaults of its profile (or `profile_override`).
inline ExperimentConfig config_from_json(const nlohmann::json& user,
                                         std::optional<ScaleProfile> profile_override = std::nullopt) {
  ScaleProfile profile = ScaleProfile::kPaper;
  if (user.contains("profile")) profile = parse_profile(detail::field<std::string>(user, "profile", ""));
  if (profile_override) profile = *profile_override;
  nlohmann::json doc = profile_defaults(profile);
  nlohmann::json patch = user;
  patch.erase("profile");
  detail::merge_into(doc, patch, "");
  doc["profile"] = to_string(profile);

  ExperimentConfig c;
  c.profile = profile;
  c.algorithm = parse_algorithm(detail::field<std::string>(doc, "algorithm", ""));
  c.seeds = detail::field<std::vector<std::uint64_t>>(doc, "seeds", "");
  c.eval_seeds = detail::field<std::vector<std::uint64_t>>(doc, "eval_seeds", "");
  c.output_dir = detail::field<std::string>(doc, "output_dir", "");
  c.scenario = detail::parse_scenario(doc.at("scenario"));
  c.train = detail::parse_train(doc.at("train"));
  c.oracle.grid_step = detail::field<int>(doc.at("oracle"), "grid_step", "oracle.");
  c.oracle.seeds = detail::field<std::vector<std::uint64_t>>(doc.at("oracle"), "seeds", "oracle.");
  if (c.seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (c.oracle.grid_step < 1) throw ConfigError("oracle.grid_step", "must be >= 1");
  if (c.oracle.seeds.empty()) throw ConfigError("oracle.seeds", "at least one seed is required");
  c.scenario.validate();
  c.resolved = std::move(doc);
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text,
                                          std::optional<ScaleProfile> profile_override = std::nullopt) {
  nlohmann::json user;
  try {
    user = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<parse>", detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  return config_from_json(user, profile_override);
}

inline ExperimentConfig load_config(const std::string& path,
                                    std::optional<ScaleProfile> profile_override = std::nullopt) {
  std::ifstream is(path);
  if (!is) throw ConfigError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), profile_override);
}

inline std::string config_hash(const ExperimentConfig& c) {
  nlohmann::json j = c.resolved;
  j.erase("output_dir");
  return hex64(fnv1a(j.dump()));
}

// Hash of the scenario alone; equal across algorithms run on the same scenario.
inline std::string scenario_hash(const ExperimentConfig& c) {
  return hex64(fnv1a(c.resolved.at("scenario").dump()));
}

}  // namespace slicesim
