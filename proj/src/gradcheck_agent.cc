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

#include "tgrl/gradcheck_agent.h"

#include <vector>

namespace tgrl {

GradCheckReport agent_grad_check(std::uint64_t seed, const AgentConfig& agent,
                                 const HyperConfig& cfg_in,
                                 std::size_t probes_per_tensor) {
  Rng rng(seed);
  SynthConfig sc;
  sc.query_dim = agent.query_dim;
  sc.video_dim = agent.video_dim;
  sc.seed = seed;
  const GroundingEpisode ep = SynthGenerator(sc).sample(rng, "gradcheck");

  HyperConfig cfg = cfg_in;
  cfg.agent = agent;
  ModelParams params = init_params(agent, rng);
  // Non-zero biases so every bias path carries signal.
  std::normal_distribution<double> normal(0.0, 0.1);
  for (auto& r : params.refs())
    if (r.tensor->shape.size() == 1)
      for (auto& v : r.tensor->data) v = normal(rng);

  // Random non-Stop moves; a shorter script ends with Stop.
  std::uniform_int_distribution<int> len_dist(1, cfg.t_max);
  std::uniform_int_distribution<int> move_dist(0, kNumActions - 2);
  const int len = len_dist(rng);
  std::vector<int> script;
  for (int i = 0; i < len; ++i) script.push_back(move_dist(rng));
  if (len < cfg.t_max) script.back() = static_cast<int>(ActionKind::kStop);
  const ActionChooser choose = [&](std::span<const double>, int step) {
    return script[static_cast<std::size_t>(step)];
  };

  LossTargets targets;
  {
    ad::Tape tape;
    const BoundParams bound = bind(tape, params);
    targets = loss_targets(rollout_on_tape(tape, bound, ep, cfg, choose).traj);
  }

  const LossBuilder build = [&](ad::Tape& tape) {
    const BoundParams bound = bind(tape, params);
    const TapedRollout tr = rollout_on_tape(tape, bound, ep, cfg, choose);
    return build_losses(tape, tr.vars, targets, ep.gt, cfg).total;
  };
  const std::vector<ParamRef> refs = params.refs();
  GradCheckOptions opts;
  opts.seed = seed;
  opts.probes_per_tensor = probes_per_tensor;
  return grad_check(refs, build, opts);
}

}  // namespace tgrl
