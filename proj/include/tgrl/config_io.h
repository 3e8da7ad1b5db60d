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

#ifndef TGRL_CONFIG_IO_H_
#define TGRL_CONFIG_IO_H_

#include <string>

#include "json.hpp"
#include "tgrl/agent.h"
#include "tgrl/eval.h"
#include "tgrl/trainer.h"

namespace tgrl {

nlohmann::json agent_config_to_json(const AgentConfig& cfg);
AgentConfig agent_config_from_json(const nlohmann::json& j);

// {"phi", "gamma", "delta", "t_max", "lambda0".."lambda3", "lr", "epochs",
//  "seed", "grad_clip", "agent": {...}}. Missing keys keep their defaults;
// unknown keys raise ConfigError.
nlohmann::json hyper_config_to_json(const HyperConfig& cfg);
HyperConfig hyper_config_from_json(const nlohmann::json& j);
HyperConfig load_hyper_config(const std::string& path);

nlohmann::json metrics_to_json(const EpochMetrics& m);
nlohmann::json eval_report_to_json(const EvalResult& r, double threshold);

}  // namespace tgrl

#endif  // TGRL_CONFIG_IO_H_
