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

#include "tgrl/config_io.h"

#include <fstream>
#include <set>

#include "tgrl/errors.h"

namespace tgrl {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const char* where) {
  if (!j.is_object())
    throw ConfigError(std::string(where) + ": expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key))
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

json agent_config_to_json(const AgentConfig& c) {
  return {{"query_dim", c.query_dim},       {"video_dim", c.video_dim},
          {"query_enc", c.query_enc},       {"video_enc", c.video_enc},
          {"location_enc", c.location_enc}, {"state_dim", c.state_dim},
          {"hidden_dim", c.hidden_dim},     {"use_location", c.use_location}};
}

AgentConfig agent_config_from_json(const json& j) {
  reject_unknown(j,
                 {"query_dim", "video_dim", "query_enc", "video_enc",
                  "location_enc", "state_dim", "hidden_dim", "use_location",
                  "preset"},
                 "agent config");
  AgentConfig c;
  std::string preset = "desk";
  read(j, "preset", preset);
  if (preset == "paper")
    c = AgentConfig::paper();
  else if (preset != "desk")
    throw ConfigError("agent config: unknown preset '" + preset + "'");
  read(j, "query_dim", c.query_dim);
  read(j, "video_dim", c.video_dim);
  read(j, "query_enc", c.query_enc);
  read(j, "video_enc", c.video_enc);
  read(j, "location_enc", c.location_enc);
  read(j, "state_dim", c.state_dim);
  read(j, "hidden_dim", c.hidden_dim);
  read(j, "use_location", c.use_location);
  c.validate();
  return c;
}

json hyper_config_to_json(const HyperConfig& c) {
  return {{"phi", c.phi},         {"gamma", c.gamma},
          {"delta", c.delta},     {"t_max", c.t_max},
          {"lambda0", c.lambda0}, {"lambda1", c.lambda1},
          {"lambda2", c.lambda2}, {"lambda3", c.lambda3},
          {"lr", c.lr},           {"epochs", c.epochs},
          {"seed", c.seed},       {"grad_clip", c.grad_clip},
          {"agent", agent_config_to_json(c.agent)}};
}

HyperConfig hyper_config_from_json(const json& j) {
  reject_unknown(j,
                 {"phi", "gamma", "delta", "t_max", "lambda0", "lambda1",
                  "lambda2", "lambda3", "lr", "epochs", "seed", "grad_clip",
                  "agent"},
                 "config");
  HyperConfig c;
  read(j, "phi", c.phi);
  read(j, "gamma", c.gamma);
  read(j, "delta", c.delta);
  read(j, "t_max", c.t_max);
  read(j, "lambda0", c.lambda0);
  read(j, "lambda1", c.lambda1);
  read(j, "lambda2", c.lambda2);
  read(j, "lambda3", c.lambda3);
  read(j, "lr", c.lr);
  read(j, "epochs", c.epochs);
  read(j, "seed", c.seed);
  read(j, "grad_clip", c.grad_clip);
  if (j.contains("agent")) c.agent = agent_config_from_json(j.at("agent"));
  c.validate();
  return c;
}

HyperConfig load_hyper_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("config '" + path + "': " + e.what(), 0);
  }
  return hyper_config_from_json(j);
}

json metrics_to_json(const EpochMetrics& m) {
  return {{"epoch", m.epoch},
          {"actor_loss", m.actor_loss},
          {"critic_loss", m.critic_loss},
          {"sup_loss", m.sup_loss},
          {"mean_return", m.mean_return},
          {"train_acc05", m.train_acc05},
          {"mean_steps", m.mean_steps}};
}

json eval_report_to_json(const EvalResult& r, double threshold) {
  json eps = json::array();
  for (const auto& e : r.episodes)
    eps.push_back({{"id", e.id},
                   {"final", {e.final_interval.start, e.final_interval.end}},
                   {"tiou", e.final_tiou},
                   {"steps", e.steps}});
  return {{"threshold", threshold},
          {"acc", r.episodes.empty() ? 0.0 : acc_at(threshold, r.episodes)},
          {"acc_at_05", r.acc_at_05},
          {"mean_steps", r.mean_steps},
          {"mean_tiou", r.mean_tiou},
          {"episodes", std::move(eps)}};
}

}  // namespace tgrl
