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

#include "tgrl/env.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tgrl/errors.h"

namespace tgrl {

std::string_view action_name(ActionKind a) {
  switch (a) {
    case ActionKind::kMoveStartAhead:
      return "MoveStartAhead";
    case ActionKind::kMoveStartBackward:
      return "MoveStartBackward";
    case ActionKind::kMoveEndAhead:
      return "MoveEndAhead";
    case ActionKind::kMoveEndBackward:
      return "MoveEndBackward";
    case ActionKind::kShiftBothForward:
      return "ShiftBothForward";
    case ActionKind::kShiftBothBackward:
      return "ShiftBothBackward";
    case ActionKind::kStop:
      return "Stop";
  }
  return "?";
}

ActionKind action_from_index(int index) {
  if (index < 0 || index >= kNumActions)
    throw ContractError("action index out of range: " + std::to_string(index));
  return static_cast<ActionKind>(index);
}

void RewardConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (t_max < 1) throw ConfigError("t_max must be at least 1");
  if (!(phi >= 0.0 && phi <= 1.0)) throw ConfigError("phi must lie in [0,1]");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ConfigError("gamma must lie in [0,1]");
}

double tiou(Interval clip, Interval gt) {
  const double inter = std::min(gt.end, clip.end) - std::max(gt.start, clip.start);
  const double uni = std::max(gt.end, clip.end) - std::min(gt.start, clip.start);
  if (!(uni > 0.0))
    throw DegenerateIntervalError("tiou: zero-length union");
  return inter / uni;
}

double step_reward(double tiou_before, double tiou_after, int t, double phi) {
  const double penalty = phi * static_cast<double>(t);
  if (tiou_after > tiou_before && tiou_before >= 0.0) return 1.0 - penalty;
  if (0.0 <= tiou_after && tiou_after <= tiou_before) return -penalty;
  return -1.0 - penalty;
}

EnvState reset(const GroundingEpisode& episode) {
  EnvState s;
  s.episode = &episode;
  s.current = kInitialInterval;
  s.tiou_current = tiou(s.current, episode.gt);
  return s;
}

Interval move_interval(Interval c, ActionKind a, double delta) {
  switch (a) {
    case ActionKind::kMoveStartAhead:
      c.start -= delta;
      break;
    case ActionKind::kMoveStartBackward:
      c.start += delta;
      break;
    case ActionKind::kMoveEndAhead:
      c.end -= delta;
      break;
    case ActionKind::kMoveEndBackward:
      c.end += delta;
      break;
    case ActionKind::kShiftBothForward:
      c.start += delta;
      c.end += delta;
      break;
    case ActionKind::kShiftBothBackward:
      c.start -= delta;
      c.end -= delta;
      break;
    case ActionKind::kStop:
      return c;
  }
  c.start = std::clamp(c.start, 0.0, 1.0);
  c.end = std::clamp(c.end, 0.0, 1.0);
  return c;
}

StepResult apply_action(const EnvState& state, ActionKind a,
                        const RewardConfig& cfg) {
  if (state.done) throw ContractError("apply_action: episode already done");
  if (!state.episode) throw ContractError("apply_action: state has no episode");
  StepResult r;
  r.state = state;
  EnvState& s = r.state;
  s.t += 1;
  s.current = move_interval(state.current, a, cfg.delta);
  s.tiou_current = tiou(s.current, state.episode->gt);
  r.reward = step_reward(state.tiou_current, s.tiou_current, s.t, cfg.phi);
  if (a == ActionKind::kStop) {
    s.done = true;
    s.stopped = true;
  } else if (s.t >= cfg.t_max) {
    s.done = true;
  }
  return r;
}

std::vector<double> compute_returns(std::span<const double> rewards,
                                    double bootstrap, bool terminated_by_stop,
                                    double gamma) {
  if (rewards.empty())
    throw ContractError("compute_returns: empty reward sequence");
  std::vector<double> out(rewards.size());
  double next = terminated_by_stop ? 0.0 : bootstrap;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    out[i] = rewards[i] + gamma * next;
    next = out[i];
  }
  return out;
}

}  // namespace tgrl
