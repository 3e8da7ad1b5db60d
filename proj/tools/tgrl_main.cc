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

// tgrl: command-line front end for data generation, training, evaluation,
// baselines, rollout tracing and gradient checks.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tgrl/agent.h"
#include "tgrl/config_io.h"
#include "tgrl/errors.h"
#include "tgrl/eval.h"
#include "tgrl/features.h"
#include "tgrl/gradcheck_agent.h"
#include "tgrl/trainer.h"

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw tgrl::Error("cannot write '" + path + "'");
  return out;
}

tgrl::HyperConfig config_or_default(const std::string& path) {
  return path.empty() ? tgrl::HyperConfig{} : tgrl::load_hyper_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal grounding with a boundary-moving actor-critic agent"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic JSONL dataset");
  std::string gen_out;
  std::size_t gen_num = 100;
  tgrl::SynthConfig synth;
  std::uint64_t gen_seed = 0;
  gen->add_option("--out", gen_out, "Output path")->required();
  gen->add_option("--num", gen_num, "Number of episodes");
  gen->add_option("--units", synth.num_units, "Units per video (M)");
  gen->add_option("--vdim", synth.video_dim, "Video feature dim");
  gen->add_option("--qdim", synth.query_dim, "Query embedding dim");
  gen->add_option("--noise", synth.noise_sigma, "Noise sigma");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--concepts", synth.concept_count, "Latent concept count");
  gen->add_option("--min-len", synth.min_len, "Minimum gt length fraction");
  gen->add_option("--max-len", synth.max_len, "Maximum gt length fraction");
  std::size_t gen_skip = 0;
  gen->add_option("--skip", gen_skip,
                  "Episodes to draw and discard first (for disjoint splits)");

  // train
  auto* tr = app.add_subcommand("train", "Train the agent");
  std::string tr_data, tr_config, tr_ckpt, tr_metrics;
  tr->add_option("--data", tr_data, "Training dataset")->required();
  tr->add_option("--config", tr_config, "Hyper-parameter JSON");
  tr->add_option("--out-ckpt", tr_ckpt, "Checkpoint to write")->required();
  tr->add_option("--metrics", tr_metrics, "Per-epoch metrics JSONL");

  // eval
  auto* ev = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  std::string ev_data, ev_ckpt, ev_report, ev_config;
  double ev_threshold = 0.5;
  ev->add_option("--data", ev_data, "Dataset")->required();
  ev->add_option("--ckpt", ev_ckpt, "Checkpoint")->required();
  ev->add_option("--threshold", ev_threshold, "tIoU threshold");
  ev->add_option("--report", ev_report, "Report JSON path");
  ev->add_option("--config", ev_config, "Hyper-parameter JSON (delta, t_max)");

  // baseline
  auto* bl = app.add_subcommand("baseline", "RANDOM or FIXED baseline");
  std::string bl_data, bl_kind = "fixed", bl_report;
  double bl_fraction = 0.5;
  std::uint64_t bl_seed = 0;
  bl->add_option("--data", bl_data, "Dataset")->required();
  bl->add_option("--kind", bl_kind, "random or fixed")
      ->check(CLI::IsMember({"random", "fixed"}));
  bl->add_option("--length-fraction", bl_fraction, "FIXED clip length");
  bl->add_option("--seed", bl_seed, "RANDOM seed");
  bl->add_option("--report", bl_report, "Report JSON path");

  // rollout
  auto* ro = app.add_subcommand("rollout", "Trace one greedy rollout");
  std::string ro_data, ro_ckpt, ro_id, ro_trace, ro_config;
  ro->add_option("--data", ro_data, "Dataset")->required();
  ro->add_option("--ckpt", ro_ckpt, "Checkpoint")->required();
  ro->add_option("--id", ro_id, "Episode id")->required();
  ro->add_option("--trace", ro_trace, "Trace JSONL path (stdout if omitted)");
  ro->add_option("--config", ro_config, "Hyper-parameter JSON (delta, t_max)");

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  std::uint64_t gc_seed = 0;
  gc->add_option("--seed", gc_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.get_exit_code();
  }

  try {
    if (*gen) {
      synth.seed = gen_seed;
      tgrl::SynthGenerator g(synth);
      tgrl::Rng rng(gen_seed);
      g.generate(rng, gen_skip);
      tgrl::save_dataset(g.generate(rng, gen_num, "ep", gen_skip), gen_out);
      std::cout << "wrote " << gen_num << " episodes to " << gen_out << '\n';
    } else if (*tr) {
      const tgrl::Dataset data = tgrl::load_dataset(tr_data);
      const tgrl::HyperConfig cfg = config_or_default(tr_config);
      std::ofstream metrics;
      if (!tr_metrics.empty()) metrics = open_out(tr_metrics);
      auto result = tgrl::train(data, cfg, [&](const tgrl::EpochMetrics& m) {
        const auto j = tgrl::metrics_to_json(m);
        if (metrics.is_open()) metrics << j.dump() << '\n' << std::flush;
        std::cerr << j.dump() << '\n';
      });
      tgrl::AgentConfig agent = cfg.agent;
      agent.query_dim = data.front().query.size();
      agent.video_dim = data.front().video.dim;
      tgrl::save_checkpoint(result.params, agent, tr_ckpt);
    } else if (*ev) {
      const tgrl::Dataset data = tgrl::load_dataset(ev_data);
      if (data.empty()) throw tgrl::ContractError("eval: empty dataset");
      auto [params, agent] = tgrl::load_checkpoint(ev_ckpt);
      tgrl::HyperConfig cfg = config_or_default(ev_config);
      cfg.agent = agent;
      const tgrl::EvalResult r = tgrl::evaluate(data, params, cfg);
      const auto report = tgrl::eval_report_to_json(r, ev_threshold);
      if (!ev_report.empty()) open_out(ev_report) << report.dump(2) << '\n';
      std::cout << "acc@" << ev_threshold << " = " << report["acc"]
                << "  mean_steps = " << r.mean_steps
                << "  mean_tiou = " << r.mean_tiou << '\n';
    } else if (*bl) {
      const tgrl::Dataset data = tgrl::load_dataset(bl_data);
      if (data.empty()) throw tgrl::ContractError("baseline: empty dataset");
      tgrl::Rng rng(bl_seed);
      const tgrl::EvalResult r = bl_kind == "random"
                                     ? tgrl::baseline_random(data, rng)
                                     : tgrl::baseline_fixed(data, bl_fraction);
      const auto report = tgrl::eval_report_to_json(r, 0.5);
      if (!bl_report.empty()) open_out(bl_report) << report.dump(2) << '\n';
      std::cout << bl_kind << " acc@0.5 = " << r.acc_at_05
                << "  mean_tiou = " << r.mean_tiou << '\n';
    } else if (*ro) {
      const tgrl::Dataset data = tgrl::load_dataset(ro_data);
      auto [params, agent] = tgrl::load_checkpoint(ro_ckpt);
      tgrl::HyperConfig cfg = config_or_default(ro_config);
      cfg.agent = agent;
      const tgrl::GroundingEpisode* ep = nullptr;
      for (const auto& e : data)
        if (e.id == ro_id) ep = &e;
      if (!ep) throw tgrl::Error("rollout: no episode with id '" + ro_id + "'");
      const auto events = tgrl::trace_rollout(*ep, params, cfg);
      if (ro_trace.empty()) {
        tgrl::write_trace(events, std::cout);
      } else {
        auto out = open_out(ro_trace);
        tgrl::write_trace(events, out);
      }
    } else if (*gc) {
      const auto report = tgrl::agent_grad_check(gc_seed);
      for (const auto& g : report.groups)
        std::cout << g.name << " max_rel_error=" << g.max_rel_error
                  << " probes=" << g.probes << '\n';
      std::cout << "max " << report.max_error() << '\n';
      if (report.max_error() >= tgrl::kAgentGradTolerance) {
        std::cerr << "error: gradient check failed (max relative error "
                  << report.max_error() << ")\n";
        return 2;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
