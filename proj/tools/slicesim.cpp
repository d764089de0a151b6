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

// slicesim command line: train | eval | oracle | compare | sweep.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slicesim/harness/config.hpp"
#include "slicesim/harness/experiment.hpp"

namespace fs = std::filesystem;
using namespace slicesim;

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::string profile;
  std::string out;
  std::string algorithm;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_algorithm) {
  cmd->add_option("--config", o.config, "JSON experiment config (defaults when omitted)");
  cmd->add_option("--seed", o.seeds, "run seed(s), overrides the config list");
  cmd->add_option("--profile", o.profile, "scale profile: paper | desk")->check(CLI::IsMember({"paper", "desk"}));
  cmd->add_option("--out", o.out, "output directory (beats SLICESIM_OUTPUT_DIR and the config)");
  if (with_algorithm) {
    cmd->add_option("--algorithm", o.algorithm, "proposed | hard-dqn | nvs | op")
        ->check(CLI::IsMember({"proposed", "hard-dqn", "nvs", "op"}));
  }
}

ExperimentConfig resolve(const CommonOptions& o) {
  std::optional<ScaleProfile> profile;
  if (!o.profile.empty()) profile = parse_profile(o.profile);
  ExperimentConfig cfg = o.config.empty() ? config_from_json(nlohmann::json::object(), profile)
                                          : load_config(o.config, profile);
  if (!o.algorithm.empty()) {
    cfg.algorithm = parse_algorithm(o.algorithm);
    cfg.resolved["algorithm"] = o.algorithm;
  }
  if (!o.seeds.empty()) {
    cfg.seeds = o.seeds;
    cfg.resolved["seeds"] = o.seeds;
  }
  if (const char* env = std::getenv("SLICESIM_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

void print_summary(const RunOutput& out, const EnvConfig& env_cfg, const fs::path& dir) {
  std::cout << summary_text(out.log, out.summary, env_cfg) << "output=" << dir.string() << "\n\n";
}

int cmd_run(const CommonOptions& o, std::optional<Algorithm> force) {
  ExperimentConfig cfg = resolve(o);
  if (force) {
    cfg.algorithm = *force;
    cfg.resolved["algorithm"] = to_string(*force);
  }
  const EnvConfig env_cfg = cfg.algorithm_env();
  for (std::uint64_t seed : cfg.seeds) {
    const auto out = run_experiment(cfg, seed);
    const auto dir = run_dir(cfg.output_dir, cfg, seed);
    write_run_outputs(dir, out, env_cfg);
    print_summary(out, env_cfg, dir);
  }
  return 0;
}

int cmd_eval(const CommonOptions& o, const std::string& checkpoint) {
  ExperimentConfig cfg = resolve(o);
  const auto ckpt = load_checkpoint(checkpoint);
  const EnvConfig env_cfg = cfg.algorithm_env();
  if (ckpt.net.input_size() != env_cfg.observation_size() || ckpt.net.output_size() != env_cfg.num_actions()) {
    throw UsageError("checkpoint shape does not match the configured scenario");
  }
  const std::vector<std::uint64_t> seeds = o.seeds.empty() ? cfg.eval_seeds : o.seeds;
  RunOutput out;
  out.log = make_log_header(cfg, seeds.front());
  out.log.rows = evaluate_greedy(env_cfg, ckpt.net, seeds);
  out.summary = summarize(out.log.rows, env_cfg);
  const auto dir = fs::path(cfg.output_dir) / (to_string(cfg.algorithm) + "_eval_seed" + std::to_string(seeds.front()));
  write_run_outputs(dir, out, env_cfg);
  print_summary(out, env_cfg, dir);
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& out_dir) {
  std::vector<RunLog> logs;
  for (const auto& p : paths) logs.push_back(read_runlog(p));
  const auto rep = compare_logs(logs);
  const std::string summary = compare_summary_text(rep);
  std::cout << summary;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "compare.csv") << rep.table_csv;
    std::ofstream(fs::path(out_dir) / "compare_summary.csv") << summary;
  }
  return 0;
}

int cmd_sweep(const CommonOptions& o, const std::vector<std::string>& algorithms) {
  ExperimentConfig base = resolve(o);
  for (std::uint64_t seed : base.seeds) {
    std::vector<RunLog> logs;
    for (const auto& name : algorithms) {
      ExperimentConfig cfg = base;
      cfg.algorithm = parse_algorithm(name);
      cfg.resolved["algorithm"] = name;
      const EnvConfig env_cfg = cfg.algorithm_env();
      auto out = run_experiment(cfg, seed);
      const auto dir = run_dir(cfg.output_dir, cfg, seed);
      write_run_outputs(dir, out, env_cfg);
      print_summary(out, env_cfg, dir);
      logs.push_back(std::move(out.log));
    }
    if (logs.size() >= 2) {
      const auto rep = compare_logs(logs);
      const auto dir = fs::path(base.output_dir) / ("sweep_seed" + std::to_string(seed));
      fs::create_directories(dir);
      std::ofstream(dir / "compare.csv") << rep.table_csv;
      std::ofstream(dir / "compare_summary.csv") << compare_summary_text(rep);
      std::cout << compare_summary_text(rep) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slicesim: hybrid hard/soft RAN slicing with a DQN slice controller"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonOptions train_opts, eval_opts, oracle_opts, sweep_opts;
  auto* train = app.add_subcommand("train", "run the configured algorithm (trains DQN agents)");
  add_common(train, train_opts, true);

  auto* eval = app.add_subcommand("eval", "greedy evaluation of a saved checkpoint");
  add_common(eval, eval_opts, true);
  std::string checkpoint;
  eval->add_option("--checkpoint", checkpoint, "checkpoint.txt from a train run")->required()->check(CLI::ExistingFile);

  auto* oracle = app.add_subcommand("oracle", "exhaustive search for the best static allocation");
  add_common(oracle, oracle_opts, false);

  auto* compare = app.add_subcommand("compare", "align run logs and report reward deltas");
  std::vector<std::string> logs;
  std::string compare_out;
  compare->add_option("logs", logs, "runlog.csv files; the first is the reference")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", compare_out, "directory for compare.csv");

  auto* sweep = app.add_subcommand("sweep", "run several algorithms per seed and compare them");
  add_common(sweep, sweep_opts, false);
  std::vector<std::string> algorithms = {"proposed", "hard-dqn", "nvs", "op"};
  sweep->add_option("--algorithms", algorithms, "algorithms to run, first is the reference")
      ->check(CLI::IsMember({"proposed", "hard-dqn", "nvs", "op"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_run(train_opts, std::nullopt);
    if (*eval) return cmd_eval(eval_opts, checkpoint);
    if (*oracle) return cmd_run(oracle_opts, Algorithm::kOp);
    if (*compare) {
      if (const char* env = std::getenv("SLICESIM_OUTPUT_DIR"); compare_out.empty() && env && *env) compare_out = env;
      return cmd_compare(logs, compare_out);
    }
    if (*sweep) return cmd_sweep(sweep_opts, algorithms);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "simulation invariant violated: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
