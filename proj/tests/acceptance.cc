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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. Tolerances and budgets are pinned below.
//
// usage: acceptance <path-to-slicesim-cli> [results-file]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "slicesim/agent.hpp"
#include "slicesim/baselines.hpp"
#include "slicesim/env.hpp"
#include "slicesim/harness/config.hpp"
#include "slicesim/harness/experiment.hpp"
#include "slicesim/radio.hpp"

namespace fs = std::filesystem;
using namespace slicesim;

namespace {

// Pinned tolerances and budgets.
constexpr int kRateDraws = 100000;
constexpr double kInverseQExpected = 4.264891;
constexpr double kInverseQTol = 1e-5;
constexpr int kGradNets = 20;
constexpr double kGradRelTol = 1e-4;
constexpr int kConservationEpisodes = 3;
constexpr int kEquivalenceEpisodes = 3;
constexpr double kUrllcQ = 0.99;
constexpr double kSlaEpochFraction = 0.95;
constexpr double kRewardAgreement = 0.05;
constexpr double kConvergeFraction = 0.90;
constexpr std::size_t kConvergeWindow = 10;
constexpr int kFasterSeedsNeeded = 3;
constexpr double kNearOptimal = 0.90;
constexpr int kIsolationSeedsNeeded = 4;
const std::vector<std::uint64_t> kTrainSeeds = {1, 2, 3, 4, 5};

constexpr double kBudget1 = 60, kBudget2 = 120, kBudget3 = 60, kBudget45 = 900, kBudgetOp = 1800, kBudget8 = 120;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Line {
  int id;
  bool pass;
  std::string detail;
};

std::vector<Line> g_lines;

void report(int id, bool pass, const std::string& detail) {
  g_lines.push_back({id, pass, detail});
  std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << std::endl;
}

ExperimentConfig desk_config(Algorithm alg) {
  auto cfg = config_from_json(nlohmann::json::object(), ScaleProfile::kDesk);
  cfg.algorithm = alg;
  cfg.resolved["algorithm"] = to_string(alg);
  return cfg;
}

// 1. Numerical kernels.
void criterion1() {
  const auto t0 = Clock::now();
  ChannelParams p;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> log_sinr(-3.0, 4.0), log_eps(-12.0, std::log10(0.4999));
  std::uniform_int_distribution<int> rbs(1, 100);
  std::uniform_real_distribution<double> blk(1.0, 20000.0);
  int violations = 0;
  for (int i = 0; i < kRateDraws; ++i) {
    const double g = std::pow(10.0, log_sinr(rng));
    const int n = rbs(rng);
    const ShortPacketParams sp{std::pow(10.0, log_eps(rng)), blk(rng)};
    if (rate_short(n, g, sp, p) > rate_long(n, g, p)) ++violations;
  }
  const double oracle = testing::bisect_inverse_q(1e-5);
  const double iq = inverse_q(1e-5);
  const bool iq_ok = std::abs(iq - kInverseQExpected) <= kInverseQTol && std::abs(iq - oracle) <= kInverseQTol;

  double worst = 0;
  std::mt19937_64 srng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> width(2, 6);
  for (int n = 0; n < kGradNets; ++n) {
    const std::vector<int> sizes{width(srng), width(srng), width(srng), width(srng)};
    const Mlp online = testing::random_net(sizes, 1000 + n);
    const Mlp target = testing::random_net(sizes, 2000 + n);
    std::vector<Transition> ts;
    for (int i = 0; i < 5; ++i) {
      std::vector<double> s(sizes[0]), s2(sizes[0]);
      for (double& x : s) x = u(srng);
      for (double& x : s2) x = u(srng);
      ts.push_back({s, i % sizes.back(), u(srng), s2, i == 4});
    }
    std::vector<const Transition*> batch;
    for (const auto& t : ts) batch.push_back(&t);
    worst = std::max(worst, testing::check_td_gradient(online, target, batch, 0.9).max_rel_error);
  }
  const double dt = since(t0);
  report(1, violations == 0 && iq_ok && worst < kGradRelTol && dt < kBudget1,
         "rate_short>rate_long in " + std::to_string(violations) + "/" + std::to_string(kRateDraws) +
             " draws; inverse_q(1e-5)=" + fmt("%.9f", iq) + " bisection=" + fmt("%.9f", oracle) +
             "; worst backprop rel err over " + std::to_string(kGradNets) + " nets=" + fmt("%.2e", worst) +
             "; " + fmt("%.1fs", dt));
}

// 2. Conservation over full desk episodes for both hybrid and hard setups.
void criterion2() {
  const auto t0 = Clock::now();
  long ttis = 0, bad_tti = 0, bad_action = 0, actions = 0;
  std::string first_failure;
  for (const EnvConfig& cfg : {desk_config(Algorithm::kProposed).scenario,
                               hard_dqn_config(desk_config(Algorithm::kProposed).scenario)}) {
    for (int ep = 0; ep < kConservationEpisodes; ++ep) {
      SlicingEnv env(cfg);
      env.set_tti_observer([&](const TtiRecord& r) {
        ++ttis;
        int total = 0, common = 0;
        bool ok = r.allocation.total() == cfg.num_rbs();
        for (int m = 0; m < cfg.num_slices(); ++m) {
          int ded = 0, com = 0;
          for (const auto& g : r.grants[m]) {
            ded += g.rbs_dedicated;
            com += g.rbs_common;
          }
          ok = ok && ded <= r.allocation.dedicated[m] && com <= r.common_share[m];
          total += ded + com;
          common += com;
        }
        ok = ok && common <= r.allocation.common && total <= cfg.num_rbs() && (cfg.hybrid || common == 0);
        if (!ok) {
          ++bad_tti;
          if (first_failure.empty()) first_failure = "tti " + std::to_string(r.tti);
        }
      });
      std::mt19937_64 rng(300 + ep);
      std::uniform_int_distribution<int> pick(0, cfg.num_actions() - 1);
      env.reset(300 + ep);
      while (!env.terminal()) {
        const auto r = env.step(pick(rng));
        ++actions;
        bool ok = r.allocation.total() == cfg.num_rbs() && r.allocation.common >= 0;
        for (int d : r.allocation.dedicated) ok = ok && d >= 0;
        if (!ok) ++bad_action;
      }
    }
  }
  const double dt = since(t0);
  report(2, bad_tti == 0 && bad_action == 0 && dt < kBudget2,
         std::to_string(bad_tti) + "/" + std::to_string(ttis) + " TTIs and " + std::to_string(bad_action) + "/" +
             std::to_string(actions) + " actions violate conservation/isolation/sum=W" +
             (first_failure.empty() ? "" : " (first: " + first_failure + ")") + "; " + fmt("%.1fs", dt));
}

// 3. With an empty common pool the hybrid env and the hard config must agree
// bit for bit. Actions are drawn from the zero-net subset so the pool stays
// empty (a net release would refill it in the hybrid env only).
void criterion3() {
  const auto t0 = Clock::now();
  const EnvConfig hard = hard_dqn_config(desk_config(Algorithm::kProposed).scenario);
  EnvConfig hybrid = desk_config(Algorithm::kProposed).scenario;
  hybrid.initial_dedicated = hard.initial_allocation().dedicated;
  hybrid.initial_common = 0;
  std::vector<int> zero_net;
  for (int a = 0; a < hybrid.num_actions(); ++a) {
    const auto d = decode_action(a, hybrid);
    if (d[0] + d[1] == 0) zero_net.push_back(a);
  }
  long compared = 0, mismatches = 0;
  for (int ep = 0; ep < kEquivalenceEpisodes; ++ep) {
    SlicingEnv a(hybrid), b(hard);
    if (a.reset(500 + ep) != b.reset(500 + ep)) ++mismatches;
    std::mt19937_64 rng(500 + ep);
    std::uniform_int_distribution<std::size_t> pick(0, zero_net.size() - 1);
    while (!a.terminal()) {
      const int act = zero_net[pick(rng)];
      const auto ra = a.step(act), rb = b.step(act);
      ++compared;
      bool same = ra.reward == rb.reward && ra.observation == rb.observation && ra.allocation == rb.allocation &&
                  ra.stats.utility == rb.stats.utility && ra.stats.spectral_eff == rb.stats.spectral_eff &&
                  ra.allocation.common == 0;
      for (std::size_t m = 0; m < ra.stats.slices.size(); ++m) {
        same = same && ra.stats.slices[m].bits == rb.stats.slices[m].bits &&
               ra.stats.slices[m].delivered == rb.stats.slices[m].delivered &&
               ra.stats.slices[m].dropped == rb.stats.slices[m].dropped;
      }
      if (!same) ++mismatches;
    }
  }
  const double dt = since(t0);
  report(3, mismatches == 0 && dt < kBudget3,
         std::to_string(mismatches) + " mismatching epochs out of " + std::to_string(compared) +
             " (initial " + hybrid.initial_allocation().to_string() + ", " + std::to_string(zero_net.size()) +
             " zero-net actions); " + fmt("%.1fs", dt));
}

struct SeedRuns {
  std::uint64_t seed;
  RunOutput proposed, hard;
};

std::vector<double> rewards_of(const RunLog& log) {
  std::vector<double> r;
  for (const auto& row : log.rows) r.push_back(row.stats.reward);
  return r;
}

long urllc_violations(const RunLog& log, std::size_t first_n = SIZE_MAX) {
  long v = 0;
  for (std::size_t i = 0; i < log.rows.size() && i < first_n; ++i) {
    if (log.rows[i].stats.slices[1].q_sla < kUrllcQ) ++v;
  }
  return v;
}

// 4 & 5 share the training runs.
void criteria4and5(const std::vector<SeedRuns>& runs, double train_seconds) {
  long pv = 0, hv = 0, epochs = 0, pv10 = 0, hv10 = 0;
  std::string per_seed;
  for (const auto& r : runs) {
    const long a = urllc_violations(r.proposed.log), b = urllc_violations(r.hard.log);
    pv += a;
    hv += b;
    pv10 += urllc_violations(r.proposed.log, 10);
    hv10 += urllc_violations(r.hard.log, 10);
    epochs += static_cast<long>(r.proposed.log.rows.size());
    per_seed += " s" + std::to_string(r.seed) + "=" + std::to_string(a) + "/" + std::to_string(b);
  }
  const double frac = 1.0 - static_cast<double>(pv) / static_cast<double>(epochs);
  report(4, frac >= kSlaEpochFraction && hv > pv && train_seconds < kBudget45,
         "proposed uRLLC Q>=0.99 in " + fmt("%.4f", frac) + " of " + std::to_string(epochs) +
             " epochs; violations proposed/hard=" + std::to_string(pv) + "/" + std::to_string(hv) +
             " (first 10 epochs " + std::to_string(pv10) + "/" + std::to_string(hv10) + "; per seed" + per_seed +
             "); training " + fmt("%.0fs", train_seconds));

  double pc = 0, hc = 0;
  int faster = 0;
  std::string e2f;
  for (const auto& r : runs) {
    pc += r.proposed.summary.converged_reward / runs.size();
    hc += r.hard.summary.converged_reward / runs.size();
    const auto ep = epochs_to_fraction(rewards_of(r.proposed.log), kConvergeFraction, kConvergeWindow);
    const auto eh = epochs_to_fraction(rewards_of(r.hard.log), kConvergeFraction, kConvergeWindow);
    if (ep <= eh) ++faster;
    e2f += " s" + std::to_string(r.seed) + "=" + std::to_string(ep) + "/" + std::to_string(eh);
  }
  const double rel = std::abs(pc - hc) / std::max(std::abs(pc), std::abs(hc));
  report(5, rel <= kRewardAgreement && faster >= kFasterSeedsNeeded && train_seconds < kBudget45,
         "converged reward proposed=" + fmt("%.4f", pc) + " hard=" + fmt("%.4f", hc) + " rel diff=" +
             fmt("%.4f", rel) + "; epochs to 90% (proposed/hard)" + e2f + "; proposed no slower on " +
             std::to_string(faster) + "/5 seeds");
}

// 6. Converged proposed reward vs the best static allocation and NVS, both
// replayed on the episode seeds that make up the proposed tail window.
void criterion6(const std::vector<SeedRuns>& runs) {
  const auto t0 = Clock::now();
  const auto cfg = desk_config(Algorithm::kOp);
  const EnvConfig env = cfg.scenario;
  const auto grid = SearchGrid::full(env.num_rbs(), env.num_slices(), cfg.oracle.grid_step);
  const auto op = op_search(env, grid, cfg.oracle.seeds);
  const double op_seconds = since(t0);
  const auto nvs = nvs_alloc(env.resolved_nvs_weights(), env.num_rbs());

  double proposed = 0, op_reward = 0, nvs_reward = 0;
  for (const auto& r : runs) {
    proposed += r.proposed.summary.converged_reward / runs.size();
    // The tail window (last 10% of epochs) is exactly the final training episode.
    const std::vector<std::uint64_t> tail_seed{episode_seed(r.seed, cfg.train.episodes - 1)};
    const auto op_rows = static_rows(env, op.best, tail_seed);
    const auto nvs_rows = static_rows(env, nvs, tail_seed);
    double a = 0, b = 0;
    for (const auto& x : op_rows) a += x.stats.reward / op_rows.size();
    for (const auto& x : nvs_rows) b += x.stats.reward / nvs_rows.size();
    op_reward += a / runs.size();
    nvs_reward += b / runs.size();
  }
  report(6, proposed >= kNearOptimal * op_reward && proposed > nvs_reward && op_seconds < kBudgetOp,
         "proposed=" + fmt("%.4f", proposed) + " op" + op.best.to_string() + "=" + fmt("%.4f", op_reward) +
             " ratio=" + fmt("%.4f", proposed / op_reward) + " nvs" + nvs.to_string() + "=" +
             fmt("%.4f", nvs_reward) + "; op_search " + std::to_string(grid.candidates.size()) +
             " candidates x " + std::to_string(cfg.oracle.seeds.size()) + " seeds in " + fmt("%.0fs", op_seconds));
}

// 7. Final-window isolation of the proposed scheme.
void criterion7(const std::vector<SeedRuns>& runs) {
  const auto env = desk_config(Algorithm::kProposed).scenario;
  int ok = 0;
  std::string per_seed;
  for (const auto& r : runs) {
    const auto& o = r.proposed.summary.final_isolation;
    const bool good = o[0] >= env.slices[0].isolation_threshold && o[1] >= env.slices[1].isolation_threshold;
    if (good) ++ok;
    per_seed += " s" + std::to_string(r.seed) + "=(" + fmt("%.3f", o[0]) + "," + fmt("%.3f", o[1]) + ")";
  }
  report(7, ok >= kIsolationSeedsNeeded,
         std::to_string(ok) + "/5 seeds meet o_eMBB>=0.8 and o_uRLLC>=0.9;" + per_seed);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string body(const fs::path& p) {
  std::istringstream is(slurp(p));
  std::string line, out;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) != 0) out += line + "\n";
  }
  return out;
}

// 8. Every CLI subcommand twice with the same config and seed.
void criterion8(const std::string& cli) {
  const auto t0 = Clock::now();
  const fs::path root = fs::temp_directory_path() / "slicesim_acceptance_det";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "tiny.json";
  std::ofstream(config) << R"({"profile": "desk",
  "scenario": {"epochs_per_episode": 10, "ttis_per_epoch": 50},
  "train": {"episodes": 2},
  "oracle": {"grid_step": 10, "seeds": [7]}})";

  auto run = [&](const std::string& args, const fs::path& out) {
    const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + out.string() + "\" > \"" +
                            (out.string() + ".stdout") + "\" 2>&1";
    fs::create_directories(out);
    return std::system(cmd.c_str());
  };
  const std::string base = "--config \"" + config.string() + "\" --seed 11";
  struct Case {
    std::string name, args, file;
  };
  std::vector<Case> cases = {
      {"train-proposed", "train " + base + " --algorithm proposed", "proposed_seed11/runlog.csv"},
      {"train-hard-dqn", "train " + base + " --algorithm hard-dqn", "hard-dqn_seed11/runlog.csv"},
      {"train-nvs", "train " + base + " --algorithm nvs", "nvs_seed11/runlog.csv"},
      {"oracle", "oracle " + base, "op_seed11/runlog.csv"},
      {"sweep", "sweep " + base + " --algorithms proposed nvs", "proposed_seed11/runlog.csv"},
  };
  int failures = 0;
  std::string detail;
  for (const auto& c : cases) {
    const fs::path a = root / (c.name + "_1"), b = root / (c.name + "_2");
    const int ra = run(c.args, a), rb = run(c.args, b);
    const bool same = ra == 0 && rb == 0 && fs::exists(a / c.file) && body(a / c.file) == body(b / c.file);
    if (!same) {
      ++failures;
      detail += " " + c.name + "(exit " + std::to_string(ra) + "/" + std::to_string(rb) + ")";
    }
  }
  // eval from the trained checkpoint, and compare over two logs.
  const fs::path ckpt = root / "train-proposed_1" / "proposed_seed11" / "checkpoint.txt";
  {
    const std::string args = "eval " + base + " --checkpoint \"" + ckpt.string() + "\"";
    const fs::path a = root / "eval_1", b = root / "eval_2";
    const int ra = run(args, a), rb = run(args, b);
    const fs::path f = "proposed_eval_seed11/runlog.csv";
    if (!(ra == 0 && rb == 0 && fs::exists(a / f) && body(a / f) == body(b / f))) {
      ++failures;
      detail += " eval";
    }
    cases.push_back({"eval", args, f.string()});
  }
  {
    const std::string args = "compare \"" + (root / "train-proposed_1" / "proposed_seed11" / "runlog.csv").string() +
                             "\" \"" + (root / "train-nvs_1" / "nvs_seed11" / "runlog.csv").string() + "\"";
    const fs::path a = root / "compare_1", b = root / "compare_2";
    const int ra = run(args, a), rb = run(args, b);
    if (!(ra == 0 && rb == 0 && fs::exists(a / "compare.csv") && slurp(a / "compare.csv") == slurp(b / "compare.csv"))) {
      ++failures;
      detail += " compare";
    }
    cases.push_back({"compare", args, "compare.csv"});
  }
  const double dt = since(t0);
  report(8, failures == 0 && dt < kBudget8,
         std::to_string(cases.size() - failures) + "/" + std::to_string(cases.size()) +
             " subcommands byte-identical across two invocations" + (detail.empty() ? "" : ";" + detail) + "; " +
             fmt("%.1fs", dt));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <slicesim-cli> [results-file]\n";
    return 2;
  }
  const std::string cli = argv[1];
  try {
    criterion1();
    criterion2();
    criterion3();

    const auto t0 = Clock::now();
    std::vector<std::future<SeedRuns>> jobs;
    for (auto seed : kTrainSeeds) {
      jobs.push_back(std::async(std::launch::async, [seed] {
        return SeedRuns{seed, run_experiment(desk_config(Algorithm::kProposed), seed),
                        run_experiment(desk_config(Algorithm::kHardDqn), seed)};
      }));
    }
    std::vector<SeedRuns> runs;
    for (auto& j : jobs) runs.push_back(j.get());
    const double train_seconds = since(t0);

    criteria4and5(runs, train_seconds);
    criterion6(runs);
    criterion7(runs);
    criterion8(cli);
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }

  int failed = 0;
  for (const auto& l : g_lines) failed += l.pass ? 0 : 1;
  std::cout << "acceptance: " << (g_lines.size() - failed) << "/" << g_lines.size() << " criteria passed" << std::endl;
  if (argc >= 3) {
    std::ofstream os(argv[2]);
    for (const auto& l : g_lines) {
      os << "criterion " << l.id << ": " << (l.pass ? "PASS" : "FAIL") << "  " << l.detail << "\n";
    }
  }
  return failed == 0 ? 0 : 1;
}
