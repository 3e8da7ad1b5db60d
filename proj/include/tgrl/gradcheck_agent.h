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

#ifndef TGRL_GRADCHECK_AGENT_H_
#define TGRL_GRADCHECK_AGENT_H_

#include <cstdint>

#include "tgrl/agent.h"
#include "tgrl/grad_check.h"
#include "tgrl/trainer.h"

namespace tgrl {

inline constexpr double kAgentGradTolerance = 1e-4;

// Gradient check of the full multi-task loss through the whole agent
// (observation network, GRU, all four heads) on a seeded synthetic episode
// with a seeded random action script. Advantages, returns and tIoU targets are
// frozen from a first pass so the finite differences see the same
// stop-gradient function the trainer differentiates.
GradCheckReport agent_grad_check(std::uint64_t seed,
                                 const AgentConfig& agent = AgentConfig{},
                                 const HyperConfig& cfg = HyperConfig{},
                                 std::size_t probes_per_tensor = 12);

}  // namespace tgrl

#endif  // TGRL_GRADCHECK_AGENT_H_
