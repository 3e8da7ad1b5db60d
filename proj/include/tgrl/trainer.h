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

#ifndef TGRL_TRAINER_H_
#define TGRL_TRAINER_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tgrl/agent.h"
#include "tgrl/env.h"
#include "tgrl/features.h"

namespace tgrl {

struct HyperConfig {
  double phi = 0.001;
  double gamma = 0.4;
  double delta = 0.1;
  int t_max = 10;
  double lambda0 = 0.1;  // entropy bonus
  double lambda1 = 1.0;  // critic
  double lambda2 = 1.0;  // location regression inside the supervised loss
  double lambda3 = 1.0;  // supervised loss
  double lr = 1e-3;
  int epochs = 30;
  std::uint64_t seed = 0;
  double grad_clip = 5.0;
  AgentConfig agent;

  RewardConfig reward() const { return {phi, gamma, delta, t_max}; }
  void validate() const;
};

enum class Termination { kStop, kTMax };

struct StepRecord {
  std::vector<double> local_feature;  // V_L observed at this step
  Interval location;                  // L observed at this step
  std::array<double, 7> policy{};
  int chosen = 0;
  double value = 0.0;
  double p_tiou = 0.0;
  std::array<double, 2> p_loc{};
  double reward = 0.0;
  double tiou_before = 0.0;
  double tiou_after = 0.0;
};

struct Trajectory {
  std::string episode_id;
  std::vector<StepRecord> steps;
  std::vector<double> returns;
  Interval final_interval;
  Termination terminated_by = Termination::kStop;
  double bootstrap = 0.0;  // critic value after the last action (t_max only)
};

// Picks the action index at a step given the current policy.
using ActionChooser =
    std::function<int(std::span<const double> policy, int step)>;

// Rollout recorded on a tape so losses can be differentiated afterwards.
struct TapedRollout {
  Trajectory traj;
  std::vector<StepVars> vars;
};

TapedRollout rollout_on_tape(ad::Tape& tape, const BoundParams& bound,
                             const GroundingEpisode& episode,
                             const HyperConfig& cfg,
                             const ActionChooser& choose);

Trajectory rollout(const GroundingEpisode& episode, const ModelParams& params,
                   SelectMode mode, const HyperConfig& cfg, Rng& rng);
// Plays `actions` in order; a Stop is appended if the script runs out.
Trajectory rollout_scripted(const GroundingEpisode& episode,
                            const ModelParams& params,
                            std::span<const ActionKind> actions,
                            const HyperConfig& cfg);

// Scalar losses evaluated from recorded trajectory values.
double actor_loss(const Trajectory& traj, double lambda0);
double critic_loss(const Trajectory& traj);

struct SupervisedLoss {
  double tiou = 0.0;
  double loc = 0.0;
  double total = 0.0;
};
SupervisedLoss supervised_loss(const Trajectory& traj, Interval gt,
                               double lambda2);

struct LossBreakdown {
  double actor = 0.0;
  double critic = 0.0;
  double supervised = 0.0;
  double total = 0.0;
};
LossBreakdown total_loss(const Trajectory& traj, Interval gt,
                         const HyperConfig& cfg);

// Quantities the differentiable losses treat as constants.
struct LossTargets {
  std::vector<int> actions;
  std::vector<double> advantages;   // R_t - v(s_t)
  std::vector<double> returns;      // R_t
  std::vector<double> tiou_before;  // tIoU^(t-1)
};
LossTargets loss_targets(const Trajectory& traj);

struct LossVars {
  ad::Var actor, critic, supervised, total;
};
LossVars build_losses(ad::Tape& tape, std::span<const StepVars> steps,
                      const LossTargets& targets, Interval gt,
                      const HyperConfig& cfg);

struct EpochMetrics {
  int epoch = 0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double sup_loss = 0.0;
  double mean_return = 0.0;  // mean R_1 over the epoch's episodes
  double train_acc05 = 0.0;
  double mean_steps = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochMetrics> metrics;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Per epoch: seeded shuffle, then per episode a sampled rollout, backward on
// the total loss, gradient clipping and one Adam step. Deterministic given
// cfg.seed. Throws NumericError naming the loss component on NaN.
TrainResult train(const Dataset& data, const HyperConfig& cfg,
                  const EpochCallback& on_epoch = {});
// Continues from given parameters.
TrainResult train(const Dataset& data, const HyperConfig& cfg,
                  ModelParams init, const EpochCallback& on_epoch = {});

}  // namespace tgrl

#endif  // TGRL_TRAINER_H_
