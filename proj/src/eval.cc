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

#include "tgrl/eval.h"

#include <algorithm>
#include <cstdint>

#include "json.hpp"
#include "tgrl/errors.h"

namespace tgrl {

using nlohmann::json;

double acc_at(double threshold, std::span<const EpisodeResult> results) {
  if (results.empty()) throw ContractError("acc_at: no results");
  std::size_t hits = 0;
  for (const auto& r : results)
    if (r.final_tiou > threshold) ++hits;
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

EvalResult summarize(std::vector<EpisodeResult> episodes) {
  EvalResult out;
  std::stable_sort(episodes.begin(), episodes.end(),
                   [](const auto& a, const auto& b) { return a.id < b.id; });
  out.episodes = std::move(episodes);
  if (out.episodes.empty()) return out;
  out.acc_at_05 = acc_at(0.5, out.episodes);
  double steps = 0.0, t = 0.0;
  for (const auto& e : out.episodes) {
    steps += e.steps;
    t += e.final_tiou;
  }
  const auto n = static_cast<double>(out.episodes.size());
  out.mean_steps = steps / n;
  out.mean_tiou = t / n;
  return out;
}

EvalResult baseline_random(const Dataset& data, Rng& rng) {
  std::uniform_real_distribution<double> start(0.0, 0.5);
  std::vector<EpisodeResult> res;
  res.reserve(data.size());
  for (const auto& ep : data) {
    const double s = start(rng);
    const Interval clip{s, s + 0.5};
    res.push_back({ep.id, clip, tiou(clip, ep.gt), 1});
  }
  return summarize(std::move(res));
}

EvalResult baseline_fixed(const Dataset& data, double f) {
  if (!(f > 0.0 && f <= 1.0))
    throw ContractError("baseline_fixed: length fraction must lie in (0, 1]");
  const Interval clip{(1.0 - f) / 2.0, (1.0 + f) / 2.0};
  std::vector<EpisodeResult> res;
  res.reserve(data.size());
  for (const auto& ep : data) res.push_back({ep.id, clip, tiou(clip, ep.gt), 1});
  return summarize(std::move(res));
}

namespace {

void check_dims(const Dataset& data, const ModelParams& params) {
  const std::size_t dq = params.query_enc.weight.cols();
  const std::size_t dv = params.global_enc.weight.cols();
  for (const auto& ep : data)
    if (ep.query.size() != dq || ep.video.dim != dv)
      throw SchemaError("episode '" + ep.id + "' has dims (query " +
                        std::to_string(ep.query.size()) + ", video " +
                        std::to_string(ep.video.dim) +
                        ") but the checkpoint expects (" + std::to_string(dq) +
                        ", " + std::to_string(dv) + ")");
}

EpisodeResult greedy_episode(const GroundingEpisode& ep,
                             const ModelParams& params,
                             const HyperConfig& cfg) {
  Rng unused(0);
  const Trajectory tr = rollout(ep, params, SelectMode::kGreedy, cfg, unused);
  return {ep.id, tr.final_interval, tiou(tr.final_interval, ep.gt),
          static_cast<int>(tr.steps.size())};
}

}  // namespace

EvalResult evaluate_serial(const Dataset& data, const ModelParams& params,
                           const HyperConfig& cfg) {
  check_dims(data, params);
  std::vector<EpisodeResult> res;
  res.reserve(data.size());
  for (const auto& ep : data) res.push_back(greedy_episode(ep, params, cfg));
  return summarize(std::move(res));
}

EvalResult evaluate(const Dataset& data, const ModelParams& params,
                    const HyperConfig& cfg) {
  check_dims(data, params);
  std::vector<EpisodeResult> res(data.size());
  const auto n = static_cast<std::int64_t>(data.size());
  // Each slot is written by exactly one iteration; exceptions must not escape
  // the parallel region, so the first one is carried out.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      res[static_cast<std::size_t>(i)] =
          greedy_episode(data[static_cast<std::size_t>(i)], params, cfg);
    } catch (...) {
#pragma omp critical(tgrl_eval_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(std::move(res));
}

std::vector<TraceEvent> trace_from(const Trajectory& traj) {
  std::vector<TraceEvent> out;
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const StepRecord& s = traj.steps[i];
    TraceEvent e;
    e.t = static_cast<int>(i) + 1;
    e.before = s.location;
    e.action = action_from_index(s.chosen);
    e.after = i + 1 < traj.steps.size() ? traj.steps[i + 1].location
                                        : traj.final_interval;
    e.tiou_after = s.tiou_after;
    e.policy = s.policy;
    out.push_back(e);
  }
  return out;
}

std::vector<TraceEvent> trace_rollout(const GroundingEpisode& episode,
                                      const ModelParams& params,
                                      const HyperConfig& cfg) {
  Rng unused(0);
  return trace_from(
      rollout(episode, params, SelectMode::kGreedy, cfg, unused));
}

void write_trace(std::span<const TraceEvent> events, std::ostream& out) {
  for (const auto& e : events) {
    json j = {{"t", e.t},
              {"before", {e.before.start, e.before.end}},
              {"action", std::string(action_name(e.action))},
              {"after", {e.after.start, e.after.end}},
              {"tiou", e.tiou_after},
              {"policy", e.policy}};
    out << j.dump() << '\n';
  }
}

}  // namespace tgrl
