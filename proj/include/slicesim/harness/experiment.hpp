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

// Experiment orchestration: DQN training, greedy evaluation, static baselines,
// the exhaustive oracle, summaries and cross-run comparison.
//
// Every algorithm runs over the same sequence of episode seeds derived from
// the run seed, so logs from different algorithms align epoch by epoch.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "slicesim/agent.hpp"
#include "slicesim/baselines.hpp"
#include "slicesim/env.hpp"
#include "slicesim/harness/config.hpp"
#include "slicesim/harness/runlog.hpp"

namespace slicesim {

inline std::uint64_t episode_seed(std::uint64_t run_seed, int episode) {
  return derive_seed(run_seed, 1000 + static_cast<std::uint64_t>(episode));
}

inline RunLog make_log_header(const ExperimentConfig& cfg, std::uint64_t seed) {
  RunLog log;
  log.version = kVersion;
  log.algorithm = to_string(cfg.algorithm);
  log.seed = seed;
  log.config_hash = config_hash(cfg);
  log.scenario_hash = scenario_hash(cfg);
  nlohmann::json echoed = cfg.resolved;
  echoed.erase("output_dir");
  log.config_json = echoed.dump();
  for (const auto& s : cfg.scenario.slices) log.slice_names.push_back(s.name);
  return log;
}

inline EpochRow make_row(int episode, int epoch, std::string phase, double epsilon, int action,
                         const StepResult& r) {
  return {episode, epoch, std::move(phase), epsilon, action, r.applied, r.projected, r.allocation, r.stats};
}

struct DqnRun {
  RunLog log;
  Mlp net;
  long train_steps = 0;
};

// Trains a fresh agent for `train.episodes` episodes of the configured env.
inline DqnRun train_dqn(const ExperimentConfig& cfg, std::uint64_t seed) {
  const EnvConfig env_cfg = cfg.algorithm_env();
  SlicingEnv env(env_cfg);
  DqnAgent agent(env_cfg.observation_size(), env_cfg.num_actions(), cfg.train, derive_seed(seed, 7));
  DqnRun run{make_log_header(cfg, seed), {}, 0};
  const long total = static_cast<long>(cfg.train.episodes) * env_cfg.epochs_per_episode;
  long global = 0;
  for (int e = 0; e < cfg.train.episodes; ++e) {
    Observation obs = env.reset(episode_seed(seed, e));
    while (!env.terminal()) {
      const double eps = cfg.train.epsilon_at(global, total);
      const int a = agent.act(obs, eps);
      const int epoch = env.epoch();
      StepResult r = env.step(a);
      agent.observe({obs, a, r.reward, r.observation, r.terminal});
      run.log.rows.push_back(make_row(e, epoch, "train", eps, a, r));
      obs = std::move(r.observation);
      ++global;
    }
  }
  run.net = agent.online();
  run.train_steps = agent.train_steps();
  return run;
}

// Greedy rollouts of a frozen network, one episode per seed.
inline std::vector<EpochRow> evaluate_greedy(const EnvConfig& env_cfg, const Mlp& net,
                                             std::span<const std::uint64_t> seeds, int first_episode = 0) {
  std::vector<EpochRow> rows;
  SlicingEnv env(env_cfg);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    Observation obs = env.reset(seeds[i]);
    while (!env.terminal()) {
      const int a = argmax(net.forward(obs));
      const int epoch = env.epoch();
      StepResult r = env.step(a);
      rows.push_back(make_row(first_episode + static_cast<int>(i), epoch, "eval", 0.0, a, r));
      obs = std::move(r.observation);
    }
  }
  return rows;
}

inline std::vector<EpochRow> static_rows(const EnvConfig& env_cfg, const Allocation& alloc,
                                         std::span<const std::uint64_t> episode_seeds) {
  std::vector<EpochRow> rows;
  const int noop = noop_action(env_cfg);
  for (std::size_t e = 0; e < episode_seeds.size(); ++e) {
    int epoch = 0;
    for (const auto& r : run_static_episode(env_cfg, alloc, episode_seeds[e])) {
      rows.push_back(make_row(static_cast<int>(e), epoch++, "static", 0.0, noop, r));
    }
  }
  return rows;
}

inline std::vector<std::uint64_t> episode_seeds(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::vector<std::uint64_t> out;
  for (int e = 0; e < cfg.train.episodes; ++e) out.push_back(episode_seed(seed, e));
  return out;
}

struct RunSummary {
  std::size_t epochs = 0;
  double converged_reward = 0;            // mean over the last 10% of rows
  std::vector<double> sla_fraction;       // per slice: fraction of epochs with Q >= threshold
  std::vector<double> final_isolation;    // per slice: mean o over the last 10%
};

inline std::size_t tail_count(std::size_t n) { return std::max<std::size_t>(1, n / 10); }

inline RunSummary summarize(const std::vector<EpochRow>& rows, const EnvConfig& env_cfg) {
  RunSummary s;
  s.epochs = rows.size();
  const std::size_t M = env_cfg.slices.size();
  s.sla_fraction.assign(M, 0.0);
  s.final_isolation.assign(M, 0.0);
  if (rows.empty()) return s;
  const std::size_t tail = tail_count(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool in_tail = i >= rows.size() - tail;
    if (in_tail) s.converged_reward += rows[i].stats.reward / static_cast<double>(tail);
    for (std::size_t m = 0; m < M; ++m) {
      if (rows[i].stats.slices[m].q_sla >= env_cfg.slices[m].sla.q_threshold) s.sla_fraction[m] += 1;
      if (in_tail) s.final_isolation[m] += rows[i].stats.slices[m].isolation / static_cast<double>(tail);
    }
  }
  for (auto& f : s.sla_fraction) f /= static_cast<double>(rows.size());
  return s;
}

inline std::string summary_text(const RunLog& log, const RunSummary& s, const EnvConfig& env_cfg) {
  std::string out;
  out += "algorithm=" + log.algorithm + "\n";
  out += "seed=" + std::to_string(log.seed) + "\n";
  out += "config_hash=" + log.config_hash + "\n";
  out += "epochs=" + std::to_string(s.epochs) + "\n";
  out += "converged_reward=" + fmt_num(s.converged_reward) + "\n";
  for (std::size_t m = 0; m < env_cfg.slices.size(); ++m) {
    out += env_cfg.slices[m].name + "_sla_fraction=" + fmt_num(s.sla_fraction[m]) + "\n";
    out += env_cfg.slices[m].name + "_final_isolation=" + fmt_num(s.final_isolation[m]) + "\n";
  }
  return out;
}

struct RunOutput {
  RunLog log;
  RunSummary summary;
  std::optional<Mlp> net;
  long train_steps = 0;
  std::optional<OpResult> op;
};

// Executes the configured algorithm for one run seed.
inline RunOutput run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  RunOutput out;
  const EnvConfig env_cfg = cfg.algorithm_env();
  switch (cfg.algorithm) {
    case Algorithm::kProposed:
    case Algorithm::kHardDqn: {
      auto run = train_dqn(cfg, seed);
      out.log = std::move(run.log);
      out.net = std::move(run.net);
      out.train_steps = run.train_steps;
      break;
    }
    case Algorithm::kNvs: {
      out.log = make_log_header(cfg, seed);
      const auto alloc = nvs_alloc(env_cfg.resolved_nvs_weights(), env_cfg.num_rbs());
      out.log.rows = static_rows(env_cfg, alloc, episode_seeds(cfg, seed));
      break;
    }
    case Algorithm::kOp: {
      out.log = make_log_header(cfg, seed);
      const auto grid = SearchGrid::full(env_cfg.num_rbs(), env_cfg.num_slices(), cfg.oracle.grid_step);
      out.op = op_search(env_cfg, grid, cfg.oracle.seeds);
      out.log.rows = static_rows(env_cfg, out.op->best, episode_seeds(cfg, seed));
      break;
    }
  }
  out.summary = summarize(out.log.rows, env_cfg);
  return out;
}

inline void write_op_audit(const std::string& path, const OpResult& op) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write " + path);
  os << "candidate,allocation,common,seed,utility,reward,best\n";
  for (const auto& row : op.audit) {
    std::string alloc;
    for (std::size_t m = 0; m < row.allocation.dedicated.size(); ++m) {
      alloc += (m ? ";" : "") + std::to_string(row.allocation.dedicated[m]);
    }
    os << row.candidate << ',' << alloc << ',' << row.allocation.common << ',' << row.seed << ','
       << fmt_num(row.utility) << ',' << fmt_num(row.reward) << ',' << (row.candidate == op.best_index ? 1 : 0)
       << '\n';
  }
}

// Writes runlog.csv, epoch_stats.csv, summary.txt and, when present,
// checkpoint.txt and op_audit.csv into `dir`.
inline void write_run_outputs(const std::filesystem::path& dir, const RunOutput& out, const EnvConfig& env_cfg) {
  std::filesystem::create_directories(dir);
  write_runlog((dir / "runlog.csv").string(), out.log);
  write_epoch_stats((dir / "epoch_stats.csv").string(), out.log);
  std::ofstream((dir / "summary.txt").string()) << summary_text(out.log, out.summary, env_cfg);
  if (out.net) save_checkpoint((dir / "checkpoint.txt").string(), *out.net, out.train_steps);
  if (out.op) write_op_audit((dir / "op_audit.csv").string(), *out.op);
}

inline std::filesystem::path run_dir(const std::string& root, const ExperimentConfig& cfg, std::uint64_t seed) {
  return std::filesystem::path(root) / (to_string(cfg.algorithm) + "_seed" + std::to_string(seed));
}

// First epoch at which the trailing moving average of `rewards` (window `w`)
// reaches `fraction` of the mean of the last 10%; rewards.size() if never.
inline std::size_t epochs_to_fraction(const std::vector<double>& rewards, double fraction, std::size_t w) {
  if (rewards.empty()) return 0;
  const std::size_t tail = tail_count(rewards.size());
  const double final_mean =
      std::accumulate(rewards.end() - static_cast<std::ptrdiff_t>(tail), rewards.end(), 0.0) / tail;
  w = std::max<std::size_t>(1, w);
  double sum = 0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    sum += rewards[i];
    if (i >= w) sum -= rewards[i - w];
    const double avg = sum / static_cast<double>(std::min(i + 1, w));
    if (i + 1 >= w && avg >= fraction * final_mean) return i;
  }
  return rewards.size();
}

struct CompareEntry {
  std::string label;
  std::string algorithm;
  double converged_reward = 0;
  double delta_vs_reference = 0;  // converged_reward - reference's
};

struct CompareReport {
  std::vector<CompareEntry> entries;  // first entry is the reference
  std::string table_csv;              // episode,epoch,reward_<label>...
};

// Aligns logs on (episode, epoch). All logs must share the scenario hash and schema.
inline CompareReport compare_logs(const std::vector<RunLog>& logs) {
  if (logs.size() < 2) throw UsageError("compare needs at least two run logs");
  for (const auto& l : logs) {
    if (l.scenario_hash != logs.front().scenario_hash) {
      throw UsageError("scenario hash mismatch: " + l.scenario_hash + " vs " + logs.front().scenario_hash);
    }
  }
  CompareReport rep;
  std::map<std::string, int> seen;
  std::vector<std::map<std::pair<int, int>, double>> by_key(logs.size());
  std::vector<std::pair<int, int>> keys;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    CompareEntry e;
    e.algorithm = logs[i].algorithm;
    e.label = logs[i].algorithm + "_seed" + std::to_string(logs[i].seed);
    if (seen[e.label]++ > 0) e.label += "_" + std::to_string(seen[e.label] - 1);
    std::vector<double> rewards;
    for (const auto& r : logs[i].rows) {
      rewards.push_back(r.stats.reward);
      by_key[i][{r.episode, r.epoch}] = r.stats.reward;
      if (i == 0) keys.push_back({r.episode, r.epoch});
    }
    const std::size_t tail = tail_count(rewards.size());
    e.converged_reward =
        rewards.empty() ? 0.0
                        : std::accumulate(rewards.end() - static_cast<std::ptrdiff_t>(tail), rewards.end(), 0.0) / tail;
    rep.entries.push_back(std::move(e));
  }
  for (auto& e : rep.entries) e.delta_vs_reference = e.converged_reward - rep.entries.front().converged_reward;

  std::string csv = "episode,epoch";
  for (const auto& e : rep.entries) csv += ",reward_" + e.label;
  csv += "\n";
  for (const auto& k : keys) {
    csv += std::to_string(k.first) + "," + std::to_string(k.second);
    for (std::size_t i = 0; i < logs.size(); ++i) {
      auto it = by_key[i].find(k);
      csv += "," + (it == by_key[i].end() ? std::string() : fmt_num(it->second));
    }
    csv += "\n";
  }
  rep.table_csv = std::move(csv);
  return rep;
}

inline std::string compare_summary_text(const CompareReport& rep) {
  std::string out = "label,algorithm,converged_reward,delta_vs_" + rep.entries.front().label + "\n";
  for (const auto& e : rep.entries) {
    out += e.label + "," + e.algorithm + "," + fmt_num(e.converged_reward) + "," + fmt_num(e.delta_vs_reference) + "\n";
  }
  return out;
}

}  // namespace slicesim
