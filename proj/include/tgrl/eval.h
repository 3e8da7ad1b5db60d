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

#ifndef TGRL_EVAL_H_
#define TGRL_EVAL_H_

#include <array>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tgrl/agent.h"
#include "tgrl/features.h"
#include "tgrl/trainer.h"

namespace tgrl {

struct EpisodeResult {
  std::string id;
  Interval final_interval;
  double final_tiou = 0.0;
  int steps = 0;

  bool operator==(const EpisodeResult&) const = default;
};

struct EvalResult {
  std::vector<EpisodeResult> episodes;  // ordered by id
  double acc_at_05 = 0.0;
  double mean_steps = 0.0;
  double mean_tiou = 0.0;

  bool operator==(const EvalResult&) const = default;
};

// Fraction of episodes whose final tIoU is strictly above threshold.
// Throws ContractError on an empty list.
double acc_at(double threshold, std::span<const EpisodeResult> results);

// Sorts by id and fills the aggregates.
EvalResult summarize(std::vector<EpisodeResult> episodes);

// Clip of half the timeline with start ~ U[0, 0.5]; one step per episode.
EvalResult baseline_random(const Dataset& data, Rng& rng);
// Centered clip [(1 - f)/2, (1 + f)/2]. Requires 0 < f <= 1.
EvalResult baseline_fixed(const Dataset& data, double length_fraction);

// Greedy rollouts on a read-only parameter snapshot. The episode loop runs
// under OpenMP; evaluate_serial is the single-threaded reference and both
// return identical results. Throws SchemaError if the dataset dimensions do
// not match the parameters.
EvalResult evaluate(const Dataset& data, const ModelParams& params,
                    const HyperConfig& cfg);
EvalResult evaluate_serial(const Dataset& data, const ModelParams& params,
                           const HyperConfig& cfg);

struct TraceEvent {
  int t = 0;
  Interval before;
  ActionKind action = ActionKind::kStop;
  Interval after;
  double tiou_after = 0.0;
  std::array<double, 7> policy{};
};

std::vector<TraceEvent> trace_rollout(const GroundingEpisode& episode,
                                      const ModelParams& params,
                                      const HyperConfig& cfg);
std::vector<TraceEvent> trace_from(const Trajectory& traj);
void write_trace(std::span<const TraceEvent> events, std::ostream& out);

}  // namespace tgrl

#endif  // TGRL_EVAL_H_
