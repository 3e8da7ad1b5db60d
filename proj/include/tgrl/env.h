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

#ifndef TGRL_ENV_H_
#define TGRL_ENV_H_

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tgrl/features.h"
#include "tgrl/interval.h"

namespace tgrl {

// The seven boundary moves. The order is the policy output index.
//   "ahead"    = earlier in time (boundary - delta)
//   "backward" = later in time   (boundary + delta)
//   ShiftBothForward moves both boundaries later, ShiftBothBackward earlier.
enum class ActionKind : int {
  kMoveStartAhead = 0,
  kMoveStartBackward = 1,
  kMoveEndAhead = 2,
  kMoveEndBackward = 3,
  kShiftBothForward = 4,
  kShiftBothBackward = 5,
  kStop = 6,
};

inline constexpr int kNumActions = 7;

std::string_view action_name(ActionKind a);
ActionKind action_from_index(int index);

struct RewardConfig {
  double phi = 0.001;
  double gamma = 0.4;
  double delta = 0.1;
  int t_max = 10;

  void validate() const;
};

struct EnvState {
  const GroundingEpisode* episode = nullptr;
  Interval current;
  int t = 0;
  bool done = false;
  bool stopped = false;  // done because of Stop rather than t_max
  double tiou_current = 0.0;
};

// Generalized temporal IoU; negative when the intervals are disjoint or the
// clip is inverted. Throws DegenerateIntervalError on a zero denominator.
double tiou(Interval clip, Interval gt);

// Step reward from the tIoU before and after step t.
//   +1 - phi t  if after > before >= 0
//      - phi t  if 0 <= after <= before
//   -1 - phi t  otherwise
double step_reward(double tiou_before, double tiou_after, int t, double phi);

// Initial interval is the central half of the timeline.
inline constexpr Interval kInitialInterval{0.25, 0.75};

EnvState reset(const GroundingEpisode& episode);

// Boundary arithmetic of one action, clamped to [0, 1].
Interval move_interval(Interval current, ActionKind a, double delta);

struct StepResult {
  EnvState state;
  double reward = 0.0;
};

// Throws ContractError when state.done.
StepResult apply_action(const EnvState& state, ActionKind a,
                        const RewardConfig& cfg);

// Discounted returns. When the episode was cut off at t_max the last return
// bootstraps from the critic value; a Stop-terminated episode does not.
std::vector<double> compute_returns(std::span<const double> rewards,
                                    double bootstrap, bool terminated_by_stop,
                                    double gamma);

}  // namespace tgrl

#endif  // TGRL_ENV_H_
