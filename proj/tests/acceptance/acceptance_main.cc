// Copyright 2026 The tgrl Authors.
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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Training-based criteria share a run cache, so the
// default configuration trained for criterion 4 is reused by 5, 6 and 7.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tgrl/agent.h"
#include "tgrl/config_io.h"
#include "tgrl/env.h"
#include "tgrl/errors.h"
#include "tgrl/eval.h"
#include "tgrl/features.h"
#include "tgrl/gradcheck_agent.h"
#include "tgrl/trainer.h"

namespace {

using namespace tgrl;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and budgets.
constexpr double kTiouTol = 1e-12;
constexpr double kReturnsTol = 1e-12;
constexpr double kOracleBudgetSec = 10.0;
constexpr double kGradTol = 1e-4;
constexpr double kGradBudgetSec = 60.0;
constexpr double kFuzzBudgetSec = 30.0;
constexpr double kDeltaTol = 1e-12;
constexpr double kMinAcc = 0.60;
constexpr double kMinMarginOverRandom = 0.30;
constexpr int kMinSeedsPassing = 4;
constexpr double kRunBudgetSec = 15 * 60.0;  // one seed: train + eval
constexpr double kMinStepReduction = 2.0;

constexpr std::size_t kTrainSize = 2000;
constexpr std::size_t kTestSize = 500;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": "
            << detail << std::endl;
  return pass;
}

// --- criterion 1 ------------------------------------------------------------

// Uses min(a, b) + max(a, b) = a + b: the intersection is the summed lengths
// minus the union.
long double tiou_oracle(Interval c, Interval g) {
  const long double cs = c.start, ce = c.end, gs = g.start, ge = g.end;
  const long double uni = std::max(ce, ge) - std::min(cs, gs);
  const long double inter = (ce - cs) + (ge - gs) - uni;
  return inter / uni;
}

bool criterion_formulas() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double tiou_err = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) b = std::min(1.0, a + 1e-3);
    const Interval gt{a, b};
    // Odd cases keep the raw draw, so about half of them are inverted, as the
    // agent can produce such clips.
    Interval clip{u(rng), u(rng)};
    if (i % 2 == 0 && clip.start > clip.end) std::swap(clip.start, clip.end);
    const long double want = tiou_oracle(clip, gt);
    const double got = tiou(clip, gt);
    tiou_err = std::max(tiou_err, static_cast<double>(std::fabs(got - want)));
  }

  // Integer grid so category decisions do not depend on rounding.
  const double phi = 0.001;
  int reward_cases = 0, reward_exact = 0;
  for (int p = -5; p <= 10; ++p) {
    for (int n = -5; n <= 10; ++n) {
      for (int t = 1; t <= 10; ++t) {
        const double penalty = phi * t;
        double want;
        if (n > p && p >= 0)
          want = 1.0 - penalty;
        else if (n >= 0 && n <= p)
          want = -penalty;
        else
          want = -1.0 - penalty;
        ++reward_cases;
        if (step_reward(p / 10.0, n / 10.0, t, phi) == want) ++reward_exact;
      }
    }
  }

  double ret_err = 0.0;
  std::uniform_int_distribution<int> len(1, 10);
  std::uniform_real_distribution<double> r(-1.01, 1.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> rewards(static_cast<std::size_t>(len(rng)));
    for (auto& x : rewards) x = r(rng);
    const double boot = r(rng);
    const bool stop = i % 2 == 1;
    const double gamma = 0.4;
    const auto got = compute_returns(rewards, boot, stop, gamma);
    const std::size_t n = rewards.size();
    for (std::size_t k = 0; k < n; ++k) {
      long double s = 0.0L;
      for (std::size_t j = k; j < n; ++j)
        s += std::pow(static_cast<long double>(gamma), j - k) * rewards[j];
      if (!stop) s += std::pow(static_cast<long double>(gamma), n - k) * boot;
      ret_err = std::max(ret_err, static_cast<double>(std::fabs(got[k] - s)));
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = tiou_err <= kTiouTol && reward_exact == reward_cases &&
                    ret_err <= kReturnsTol && secs < kOracleBudgetSec;
  return report(1, "formula oracles", pass,
                "tiou max err " + fmt("%.2e", tiou_err) + " over 10000, reward " +
                    std::to_string(reward_exact) + "/" +
                    std::to_string(reward_cases) + " exact, returns max err " +
                    fmt("%.2e", ret_err) + " over 1000, " +
                    fmt("%.2f", secs) + " s");
}

// --- criterion 2 ------------------------------------------------------------

bool criterion_gradcheck() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string worst_group;
  std::size_t groups = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GradCheckReport rep = agent_grad_check(seed);
    for (const auto& g : rep.groups) {
      ++groups;
      if (g.max_rel_error >= worst) {
        worst = g.max_rel_error;
        worst_group = g.name;
      }
    }
  }
  const double secs = seconds_since(t0);
  return report(2, "agent gradient check", worst < kGradTol && secs < kGradBudgetSec,
                "max rel err " + fmt("%.2e", worst) + " (" + worst_group +
                    ") across " + std::to_string(groups) +
                    " group checks on 5 seeds, " + fmt("%.1f", secs) + " s");
}

// --- criterion 3 ------------------------------------------------------------

// Expected boundary displacement per action, in units of delta.
constexpr int kMoveTable[7][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1},
                                  {1, 1},  {-1, -1}, {0, 0}};

bool boundary_ok(double before, double after, int dir, double delta) {
  if (!(after >= 0.0 && after <= 1.0)) return false;
  if (dir == 0) return after == before;
  const double want = before + dir * delta;
  if (std::fabs(after - want) <= kDeltaTol) return true;
  // Clamp residue: the move was cut short at the timeline edge.
  const double edge = dir > 0 ? 1.0 : 0.0;
  return after == edge && std::fabs(after - before) < delta + kDeltaTol;
}

bool criterion_fuzz() {
  const auto t0 = Clock::now();
  const RewardConfig cfg;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> act(0, kNumActions - 1);
  GroundingEpisode ep;
  long steps = 0, violations = 0, stops = 0;
  for (int i = 0; i < 100000; ++i) {
    const double len = 0.05 + 0.95 * u(rng);
    const double s = (1.0 - len) * u(rng);
    ep.gt = {s, s + len};
    EnvState st = reset(ep);
    while (!st.done) {
      const int a = act(rng);
      const StepResult r = apply_action(st, action_from_index(a), cfg);
      ++steps;
      const bool ok =
          boundary_ok(st.current.start, r.state.current.start, kMoveTable[a][0],
                      cfg.delta) &&
          boundary_ok(st.current.end, r.state.current.end, kMoveTable[a][1],
                      cfg.delta) &&
          r.state.t == st.t + 1 && r.state.t <= cfg.t_max;
      if (!ok) ++violations;
      if (a == kNumActions - 1) {
        ++stops;
        if (!r.state.done || !r.state.stopped ||
            !(r.state.current == st.current))
          ++violations;
      }
      st = r.state;
    }
    bool absorbed = false;
    try {
      apply_action(st, action_from_index(act(rng)), cfg);
    } catch (const ContractError&) {
      absorbed = true;
    }
    if (!absorbed) ++violations;
  }
  const double secs = seconds_since(t0);
  return report(3, "action fuzz", violations == 0 && secs < kFuzzBudgetSec,
                std::to_string(violations) + " violations over 100000 episodes (" +
                    std::to_string(steps) + " steps, " + std::to_string(stops) +
                    " stops), " + fmt("%.1f", secs) + " s");
}

// --- training runs ----------------------------------------------------------

struct RunResult {
  double acc = 0.0;
  double random_acc = 0.0;
  double mean_steps = 0.0;
  double seconds = 0.0;
  std::string ckpt_bytes;
  std::string report_bytes;
};

struct Split {
  Dataset train, test;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Runner {
 public:
  explicit Runner(std::filesystem::path work) : work_(std::move(work)) {
    std::filesystem::create_directories(work_);
  }

  const Split& split(std::uint64_t seed) {
    auto it = splits_.find(seed);
    if (it != splits_.end()) return it->second;
    SynthConfig sc;  // M=20, d_v=32, d_q=64, noise 0.1
    sc.seed = seed;
    const SynthGenerator gen(sc);
    Rng rng(seed);
    Split s;
    s.train = gen.generate(rng, kTrainSize);
    s.test = gen.generate(rng, kTestSize, "ep", kTrainSize);
    return splits_.emplace(seed, std::move(s)).first->second;
  }

  // Trains and evaluates with cfg; results are cached by (tag, seed) unless
  // fresh is set.
  const RunResult& run(const std::string& tag, std::uint64_t seed,
                       HyperConfig cfg, bool fresh = false) {
    const auto key = tag + "#" + std::to_string(seed);
    if (!fresh) {
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    const Split& data = split(seed);
    cfg.seed = seed;
    const auto t0 = Clock::now();
    const TrainResult tr = train(data.train, cfg);
    AgentConfig agent = cfg.agent;
    agent.query_dim = data.train.front().query.size();
    agent.video_dim = data.train.front().video.dim;
    cfg.agent = agent;
    const EvalResult ev = evaluate(data.test, tr.params, cfg);
    RunResult r;
    r.seconds = seconds_since(t0);
    r.acc = ev.acc_at_05;
    r.mean_steps = ev.mean_steps;
    Rng brng(seed);
    r.random_acc = baseline_random(data.test, brng).acc_at_05;
    const auto ckpt = (work_ / (key + ".ckpt.json")).string();
    save_checkpoint(tr.params, agent, ckpt);
    r.ckpt_bytes = slurp(ckpt);
    r.report_bytes = eval_report_to_json(ev, 0.5).dump(2);
    std::cerr << "  run " << tag << " seed " << seed << ": acc "
              << fmt("%.3f", r.acc) << ", random " << fmt("%.3f", r.random_acc)
              << ", steps " << fmt("%.2f", r.mean_steps) << ", "
              << fmt("%.0f", r.seconds) << " s" << std::endl;
    if (fresh) {
      fresh_.push_back(std::move(r));
      return fresh_.back();
    }
    return cache_.emplace(key, std::move(r)).first->second;
  }

 private:
  std::filesystem::path work_;
  std::map<std::uint64_t, Split> splits_;
  std::map<std::string, RunResult> cache_;
  std::deque<RunResult> fresh_;
};

HyperConfig defaults() { return HyperConfig{}; }

bool criterion_learning(Runner& runner) {
  int passing = 0;
  double total = 0.0, slowest = 0.0;
  std::string accs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RunResult& r = runner.run("default", seed, defaults());
    total += r.seconds;
    slowest = std::max(slowest, r.seconds);
    const bool ok =
        r.acc >= kMinAcc && r.acc >= r.random_acc + kMinMarginOverRandom;
    if (ok) ++passing;
    accs += (seed > 1 ? " " : "") + fmt("%.3f", r.acc) + "/" +
            fmt("%.3f", r.random_acc);
  }
  return report(4, "learning on synthetic data",
                passing >= kMinSeedsPassing && slowest < kRunBudgetSec,
                std::to_string(passing) + "/5 seeds pass (acc/random: " + accs +
                    "), slowest run " + fmt("%.0f", slowest) + " s, " +
                    fmt("%.0f", total) + " s for all seeds");
}

bool criterion_penalty(Runner& runner) {
  int passing = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const RunResult& low = runner.run("default", seed, defaults());
    HyperConfig high_cfg = defaults();
    high_cfg.phi = 0.5;
    const RunResult& high = runner.run("phi0.5", seed, high_cfg);
    const double drop = low.mean_steps - high.mean_steps;
    const bool ok = drop >= kMinStepReduction && low.acc >= high.acc;
    if (ok) ++passing;
    detail += (seed > 1 ? "; " : "") + std::string("seed ") +
              std::to_string(seed) + " steps " + fmt("%.2f", low.mean_steps) +
              "->" + fmt("%.2f", high.mean_steps) + " acc " +
              fmt("%.3f", low.acc) + "/" + fmt("%.3f", high.acc);
  }
  return report(5, "step penalty shortens episodes", passing >= 2,
                std::to_string(passing) + "/3 seeds pass (" + detail + ")");
}

bool criterion_ablation(Runner& runner) {
  double full = 0.0, nosup = 0.0, noloc = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    full += runner.run("default", seed, defaults()).acc / 5.0;
    HyperConfig a = defaults();
    a.lambda3 = 0.0;
    nosup += runner.run("lambda3=0", seed, a).acc / 5.0;
    HyperConfig b = defaults();
    b.agent.use_location = false;
    noloc += runner.run("no-location", seed, b).acc / 5.0;
  }
  return report(6, "ablations", full >= nosup && full >= noloc,
                "mean acc full " + fmt("%.3f", full) + ", lambda3=0 " +
                    fmt("%.3f", nosup) + " (delta " + fmt("%+.3f", full - nosup) +
                    "), no-location " + fmt("%.3f", noloc) + " (delta " +
                    fmt("%+.3f", full - noloc) + ")");
}

bool criterion_determinism(Runner& runner) {
  const RunResult& a = runner.run("default", 1, defaults());
  const RunResult& b = runner.run("default", 1, defaults(), /*fresh=*/true);
  const bool ckpt = a.ckpt_bytes == b.ckpt_bytes;
  const bool rep = a.report_bytes == b.report_bytes;
  return report(7, "bit-identical reruns", ckpt && rep,
                std::string("checkpoint ") + (ckpt ? "identical" : "DIFFERS") +
                    " (" + std::to_string(a.ckpt_bytes.size()) +
                    " bytes), eval report " + (rep ? "identical" : "DIFFERS"));
}

bool criterion_fixed_baseline() {
  SynthConfig sc;
  sc.seed = 8;
  Rng rng(8);
  Dataset data = SynthGenerator(sc).generate(rng, 500);
  for (auto& ep : data) ep.gt = {0.25, 0.75};
  const EvalResult r = baseline_fixed(data, 0.5);
  return report(8, "fixed baseline on centered ground truth",
                r.acc_at_05 == 1.0,
                "acc@0.5 " + fmt("%.3f", r.acc_at_05) + " over 500 episodes");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance gate"};
  std::vector<int> only;
  std::string work = "acceptance_work";
  app.add_option("--only", only, "Criteria to run (default all)")
      ->delimiter(',')
      ->check(CLI::Range(1, 8));
  app.add_option("--work", work, "Scratch directory for checkpoints");
  CLI11_PARSE(app, argc, argv);
  std::set<int> sel(only.begin(), only.end());
  if (sel.empty()) sel = {1, 2, 3, 4, 5, 6, 7, 8};

  try {
    Runner runner{std::filesystem::path(work)};
    bool all = true;
    if (sel.count(1)) all &= criterion_formulas();
    if (sel.count(2)) all &= criterion_gradcheck();
    if (sel.count(3)) all &= criterion_fuzz();
    if (sel.count(4)) all &= criterion_learning(runner);
    if (sel.count(5)) all &= criterion_penalty(runner);
    if (sel.count(6)) all &= criterion_ablation(runner);
    if (sel.count(7)) all &= criterion_determinism(runner);
    if (sel.count(8)) all &= criterion_fixed_baseline();
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
