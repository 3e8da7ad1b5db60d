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

#include "tgrl/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tgrl/errors.h"

namespace tgrl {

using ad::Tape;
using ad::Var;

namespace {

// Floor for log pi(a) in the actor term.
constexpr double kLogFloor = 1e-12;
// y_t gate of the location regression: tIoU^(t-1) strictly above this.
constexpr double kLocGate = 0.4;

}  // namespace

void HyperConfig::validate() const {
  reward().validate();
  if (!(lr >= 0.0)) throw ConfigError("lr must be non-negative");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (!(lambda0 >= 0.0 && lambda1 >= 0.0 && lambda2 >= 0.0 && lambda3 >= 0.0))
    throw ConfigError("loss weights must be non-negative");
  if (!(grad_clip > 0.0)) throw ConfigError("grad_clip must be positive");
  agent.validate();
}

// ---------------------------------------------------------------------------
// Rollouts

TapedRollout rollout_on_tape(Tape& tape, const BoundParams& bound,
                             const GroundingEpisode& episode,
                             const HyperConfig& cfg,
                             const ActionChooser& choose) {
  const RewardConfig rc = cfg.reward();
  const std::vector<double> global = global_pool(episode.video);
  const ContextEncoding ctx = encode_context(tape, bound, episode.query, global);
  const std::size_t hidden = tape.rows(bound.gru.u_z);
  Var h = tape.constant(std::vector<double>(hidden, 0.0), hidden);

  TapedRollout out;
  Trajectory& traj = out.traj;
  traj.episode_id = episode.id;
  EnvState st = reset(episode);
  while (!st.done) {
    StepRecord rec;
    rec.local_feature = clip_pool(episode.video, st.current);
    rec.location = st.current;
    Var s = observe(tape, bound, ctx, rec.local_feature, st.current);
    StepVars sv = actor_critic_step(tape, bound, s, h);
    auto pol = tape.value(sv.policy);
    std::copy(pol.begin(), pol.end(), rec.policy.begin());
    rec.value = tape.scalar(sv.value);
    rec.p_tiou = tape.scalar(sv.p_tiou);
    auto loc = tape.value(sv.p_loc);
    rec.p_loc = {loc[0], loc[1]};

    rec.chosen = choose(rec.policy, st.t);
    const StepResult res = apply_action(st, action_from_index(rec.chosen), rc);
    rec.reward = res.reward;
    rec.tiou_before = st.tiou_current;
    rec.tiou_after = res.state.tiou_current;

    traj.steps.push_back(std::move(rec));
    out.vars.push_back(sv);
    h = sv.hidden;
    st = res.state;
  }
  traj.final_interval = st.current;
  traj.terminated_by = st.stopped ? Termination::kStop : Termination::kTMax;
  if (traj.terminated_by == Termination::kTMax) {
    // Critic value of the state reached after the final action.
    Var s = observe(tape, bound, ctx, clip_pool(episode.video, st.current),
                    st.current);
    traj.bootstrap = tape.scalar(actor_critic_step(tape, bound, s, h).value);
  }
  std::vector<double> rewards;
  rewards.reserve(traj.steps.size());
  for (const auto& r : traj.steps) rewards.push_back(r.reward);
  traj.returns = compute_returns(rewards, traj.bootstrap,
                                 traj.terminated_by == Termination::kStop,
                                 cfg.gamma);
  return out;
}

Trajectory rollout(const GroundingEpisode& episode, const ModelParams& params,
                   SelectMode mode, const HyperConfig& cfg, Rng& rng) {
  Tape tape;
  const BoundParams bound = bind_frozen(tape, params);
  return rollout_on_tape(tape, bound, episode, cfg,
                         [&](std::span<const double> policy, int) {
                           return select_action(policy, mode, rng);
                         })
      .traj;
}

Trajectory rollout_scripted(const GroundingEpisode& episode,
                            const ModelParams& params,
                            std::span<const ActionKind> actions,
                            const HyperConfig& cfg) {
  Tape tape;
  const BoundParams bound = bind_frozen(tape, params);
  return rollout_on_tape(tape, bound, episode, cfg,
                         [&](std::span<const double>, int step) {
                           const auto i = static_cast<std::size_t>(step);
                           return static_cast<int>(
                               i < actions.size() ? actions[i]
                                                  : ActionKind::kStop);
                         })
      .traj;
}

// ---------------------------------------------------------------------------
// Losses from recorded values

double actor_loss(const Trajectory& traj, double lambda0) {
  double pg = 0.0;
  double ent = 0.0;
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const StepRecord& s = traj.steps[t];
    const double adv = traj.returns[t] - s.value;
    const double p = s.policy[static_cast<std::size_t>(s.chosen)];
    pg -= std::log(std::max(p, kLogFloor)) * adv;
    for (double q : s.policy) ent -= q * std::log(std::max(q, kLogFloor));
  }
  return pg - lambda0 * ent;
}

double critic_loss(const Trajectory& traj) {
  double l = 0.0;
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const double d = traj.steps[t].value - traj.returns[t];
    l += d * d;
  }
  return l;
}

SupervisedLoss supervised_loss(const Trajectory& traj, Interval gt,
                               double lambda2) {
  SupervisedLoss out;
  for (const auto& s : traj.steps) {
    out.tiou += std::fabs(s.tiou_before - s.p_tiou);
    if (s.tiou_before > kLocGate)
      out.loc += (std::fabs(gt.start - s.p_loc[0]) +
                  std::fabs(gt.end - s.p_loc[1])) /
                 2.0;
  }
  out.total = out.tiou + lambda2 * out.loc;
  return out;
}

LossBreakdown total_loss(const Trajectory& traj, Interval gt,
                         const HyperConfig& cfg) {
  LossBreakdown b;
  b.actor = actor_loss(traj, cfg.lambda0);
  b.critic = critic_loss(traj);
  b.supervised = supervised_loss(traj, gt, cfg.lambda2).total;
  b.total = (b.actor + cfg.lambda1 * b.critic) + cfg.lambda3 * b.supervised;
  return b;
}

// ---------------------------------------------------------------------------
// Differentiable losses

LossTargets loss_targets(const Trajectory& traj) {
  LossTargets t;
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const StepRecord& s = traj.steps[i];
    t.actions.push_back(s.chosen);
    t.returns.push_back(traj.returns[i]);
    t.advantages.push_back(traj.returns[i] - s.value);
    t.tiou_before.push_back(s.tiou_before);
  }
  return t;
}

LossVars build_losses(Tape& tape, std::span<const StepVars> steps,
                      const LossTargets& targets, Interval gt,
                      const HyperConfig& cfg) {
  if (steps.size() != targets.actions.size())
    throw ContractError("build_losses: step/target count mismatch");
  std::vector<Var> actor_terms, critic_terms, tiou_terms, loc_terms;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const StepVars& v = steps[t];
    const auto a = static_cast<std::size_t>(targets.actions[t]);
    Var logp = ad::log_clamped(tape, ad::pick(tape, v.policy, a), kLogFloor);
    actor_terms.push_back(ad::scale(tape, logp, -targets.advantages[t]));
    actor_terms.push_back(ad::scale(
        tape, ad::entropy(tape, v.policy, kLogFloor), -cfg.lambda0));

    critic_terms.push_back(
        ad::square(tape, ad::shift(tape, v.value, -targets.returns[t])));

    tiou_terms.push_back(
        ad::abs(tape, ad::shift(tape, v.p_tiou, -targets.tiou_before[t])));
    if (targets.tiou_before[t] > kLocGate) {
      Var ds = ad::abs(tape, ad::shift(tape, ad::pick(tape, v.p_loc, 0), -gt.start));
      Var de = ad::abs(tape, ad::shift(tape, ad::pick(tape, v.p_loc, 1), -gt.end));
      loc_terms.push_back(ad::scale(tape, ad::add(tape, ds, de), 0.5));
    }
  }
  LossVars out;
  out.actor = ad::add_n(tape, actor_terms);
  out.critic = ad::add_n(tape, critic_terms);
  Var tiou_loss = ad::add_n(tape, tiou_terms);
  Var loc_loss = ad::add_n(tape, loc_terms);
  out.supervised =
      ad::add(tape, tiou_loss, ad::scale(tape, loc_loss, cfg.lambda2));
  Var rl = ad::add(tape, out.actor, ad::scale(tape, out.critic, cfg.lambda1));
  out.total = ad::add(tape, rl, ad::scale(tape, out.supervised, cfg.lambda3));
  return out;
}

// ---------------------------------------------------------------------------
// Training

namespace {

HyperConfig with_dataset_dims(const Dataset& data, HyperConfig cfg) {
  cfg.agent.query_dim = data.front().query.size();
  cfg.agent.video_dim = data.front().video.dim;
  return cfg;
}

void check_finite(double v, const char* component, int epoch,
                  const std::string& id) {
  if (std::isnan(v) || std::isinf(v))
    throw NumericError(std::string("training diverged: ") + component +
                       " loss is not finite (epoch " + std::to_string(epoch) +
                       ", episode '" + id + "')");
}

}  // namespace

TrainResult train(const Dataset& data, const HyperConfig& cfg_in,
                  const EpochCallback& on_epoch) {
  if (data.empty()) throw ContractError("train: empty dataset");
  const HyperConfig cfg = with_dataset_dims(data, cfg_in);
  Rng init_rng(cfg.seed);
  return train(data, cfg, init_params(cfg.agent, init_rng), on_epoch);
}

TrainResult train(const Dataset& data, const HyperConfig& cfg_in,
                  ModelParams init, const EpochCallback& on_epoch) {
  if (data.empty()) throw ContractError("train: empty dataset");
  const HyperConfig cfg = with_dataset_dims(data, cfg_in);
  cfg.validate();

  TrainResult result;
  result.params = std::move(init);
  ModelParams& params = result.params;
  const std::vector<ParamRef> refs = params.refs();
  zero_grads(refs);
  AdamState adam;

  // Independent streams for shuffling and action sampling.
  Rng shuffle_rng(cfg.seed + 0x5bd1e995ULL);
  Rng action_rng(cfg.seed + 0x27d4eb2fULL);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochMetrics m;
    m.epoch = epoch;
    for (std::size_t idx : order) {
      const GroundingEpisode& ep = data[idx];
      Tape tape;
      const BoundParams bound = bind(tape, params);
      TapedRollout tr = rollout_on_tape(
          tape, bound, ep, cfg, [&](std::span<const double> policy, int) {
            return select_action(policy, SelectMode::kSample, action_rng);
          });
      const LossTargets targets = loss_targets(tr.traj);
      const LossVars losses = build_losses(tape, tr.vars, targets, ep.gt, cfg);
      const double la = tape.scalar(losses.actor);
      const double lc = tape.scalar(losses.critic);
      const double ls = tape.scalar(losses.supervised);
      check_finite(la, "actor", epoch, ep.id);
      check_finite(lc, "critic", epoch, ep.id);
      check_finite(ls, "supervised", epoch, ep.id);

      tape.backward(losses.total);
      clip_grad_norm(refs, cfg.grad_clip);
      adam_update(refs, cfg.lr, adam);

      m.actor_loss += la;
      m.critic_loss += lc;
      m.sup_loss += ls;
      m.mean_return += tr.traj.returns.front();
      m.train_acc05 +=
          tiou(tr.traj.final_interval, ep.gt) > 0.5 ? 1.0 : 0.0;
      m.mean_steps += static_cast<double>(tr.traj.steps.size());
    }
    const auto n = static_cast<double>(data.size());
    m.actor_loss /= n;
    m.critic_loss /= n;
    m.sup_loss /= n;
    m.mean_return /= n;
    m.train_acc05 /= n;
    m.mean_steps /= n;
    result.metrics.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  return result;
}

}  // namespace tgrl
