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

// Run log CSV (one row per episode/epoch) and the long-form epoch stats CSV
// (one row per episode/epoch/slice plus a global row).
//
// Run log layout, schema 1:
//   # slicesim-runlog schema=1
//   # version=<artifact version>
//   # algorithm=<proposed|hard-dqn|nvs|op>
//   # seed=<run seed>
//   # config_hash=<16 hex>
//   # scenario_hash=<16 hex>
//   # config=<resolved config, one-line JSON>
//   episode,epoch,phase,epsilon,action,delta_<slice>...,projected,common,
//   reward,utility,se,se_norm,<slice>_w,<slice>_q,<slice>_o,<slice>_mu,<slice>_cu...
// `cu` is the mean number of common RBs per TTI the slice used.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "slicesim/env.hpp"
#include "slicesim/error.hpp"

namespace slicesim {

inline constexpr int kRunLogSchema = 1;

struct EpochRow {
  int episode = 0;
  int epoch = 0;
  std::string phase = "train";  // train | eval | static
  double epsilon = 0;
  int action = 0;
  SlicingAction applied;
  bool projected = false;
  Allocation allocation;
  EpochStats stats;
};

struct RunLog {
  int schema = kRunLogSchema;
  std::string version;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string scenario_hash;
  std::string config_json;
  std::vector<std::string> slice_names;
  std::vector<EpochRow> rows;
};

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string runlog_columns(const std::vector<std::string>& slices) {
  std::string h = "episode,epoch,phase,epsilon,action";
  for (const auto& s : slices) h += ",delta_" + s;
  h += ",projected,common,reward,utility,se,se_norm";
  for (const auto& s : slices) h += "," + s + "_w," + s + "_q," + s + "_o," + s + "_mu," + s + "_cu";
  return h;
}

inline void write_runlog(std::ostream& os, const RunLog& log) {
  os << "# slicesim-runlog schema=" << log.schema << '\n';
  os << "# version=" << log.version << '\n';
  os << "# algorithm=" << log.algorithm << '\n';
  os << "# seed=" << log.seed << '\n';
  os << "# config_hash=" << log.config_hash << '\n';
  os << "# scenario_hash=" << log.scenario_hash << '\n';
  os << "# config=" << log.config_json << '\n';
  os << runlog_columns(log.slice_names) << '\n';
  for (const auto& r : log.rows) {
    os << r.episode << ',' << r.epoch << ',' << r.phase << ',' << fmt_num(r.epsilon) << ',' << r.action;
    for (int d : r.applied) os << ',' << d;
    os << ',' << (r.projected ? 1 : 0) << ',' << r.allocation.common << ',' << fmt_num(r.stats.reward) << ','
       << fmt_num(r.stats.utility) << ',' << fmt_num(r.stats.spectral_eff) << ','
       << fmt_num(r.stats.spectral_eff_norm);
    for (const auto& s : r.stats.slices) {
      os << ',' << s.dedicated_rbs << ',' << fmt_num(s.q_sla) << ',' << fmt_num(s.isolation) << ','
         << fmt_num(s.utilization) << ',' << fmt_num(s.common_used);
    }
    os << '\n';
  }
}

inline void write_runlog(const std::string& path, const RunLog& log) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write " + path);
  write_runlog(os, log);
}

inline void write_epoch_stats(const std::string& path, const RunLog& log) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write " + path);
  os << "episode,epoch,slice,q,o,mu,w,common_used,bits,delivered,dropped,se,se_norm,utility,reward\n";
  for (const auto& r : log.rows) {
    for (const auto& s : r.stats.slices) {
      os << r.episode << ',' << r.epoch << ',' << s.name << ',' << fmt_num(s.q_sla) << ',' << fmt_num(s.isolation)
         << ',' << fmt_num(s.utilization) << ',' << s.dedicated_rbs << ',' << fmt_num(s.common_used) << ','
         << fmt_num(s.bits) << ',' << s.delivered << ',' << s.dropped << ",,,,\n";
    }
    os << r.episode << ',' << r.epoch << ",*,,,," << r.allocation.common << ",,,,," << fmt_num(r.stats.spectral_eff)
       << ',' << fmt_num(r.stats.spectral_eff_norm) << ',' << fmt_num(r.stats.utility) << ','
       << fmt_num(r.stats.reward) << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

// Reads back a run log. Only the columns needed to rebuild rows are parsed;
// per-slice stats are restored from the named columns.
inline RunLog read_runlog(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read " + path);
  RunLog log;
  log.schema = -1;
  std::map<std::string, std::string> meta;
  std::string line;
  std::vector<std::string> cols;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto body = line.substr(2);
      if (body.rfind("slicesim-runlog schema=", 0) == 0) {
        log.schema = std::stoi(body.substr(23));
        continue;
      }
      const auto eq = body.find('=');
      if (eq != std::string::npos) meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    cols = detail::split_csv(line);
    break;
  }
  if (log.schema < 0) throw UsageError(path + ": not a slicesim run log");
  if (log.schema != kRunLogSchema) {
    throw UsageError(path + ": unsupported run log schema " + std::to_string(log.schema));
  }
  log.version = meta["version"];
  log.algorithm = meta["algorithm"];
  log.seed = meta.count("seed") ? std::stoull(meta["seed"]) : 0;
  log.config_hash = meta["config_hash"];
  log.scenario_hash = meta["scenario_hash"];
  log.config_json = meta["config"];

  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < cols.size(); ++i) idx[cols[i]] = i;
  for (const auto& c : cols) {
    if (c.size() > 2 && c.compare(c.size() - 2, 2, "_w") == 0) log.slice_names.push_back(c.substr(0, c.size() - 2));
  }
  for (const char* req : {"episode", "epoch", "phase", "reward", "utility", "common"}) {
    if (!idx.count(req)) throw UsageError(path + ": missing column " + req);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != cols.size()) throw UsageError(path + ": ragged row");
    auto num = [&](const std::string& c) { return std::stod(f.at(idx.at(c))); };
    EpochRow r;
    r.episode = std::stoi(f[idx["episode"]]);
    r.epoch = std::stoi(f[idx["epoch"]]);
    r.phase = f[idx["phase"]];
    r.epsilon = num("epsilon");
    r.action = std::stoi(f[idx["action"]]);
    r.projected = f[idx["projected"]] == "1";
    r.allocation.common = std::stoi(f[idx["common"]]);
    r.stats.reward = num("reward");
    r.stats.utility = num("utility");
    r.stats.spectral_eff = num("se");
    r.stats.spectral_eff_norm = num("se_norm");
    r.stats.common_rbs = r.allocation.common;
    for (const auto& s : log.slice_names) {
      r.applied.push_back(std::stoi(f.at(idx.at("delta_" + s))));
      SliceEpochStats st;
      st.name = s;
      st.dedicated_rbs = std::stoi(f.at(idx.at(s + "_w")));
      st.q_sla = num(s + "_q");
      st.isolation = num(s + "_o");
      st.utilization = num(s + "_mu");
      st.common_used = num(s + "_cu");
      r.allocation.dedicated.push_back(st.dedicated_rbs);
      r.stats.slices.push_back(st);
    }
    log.rows.push_back(std::move(r));
  }
  return log;
}

}  // namespace slicesim
