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

#ifndef TGRL_GRAD_CHECK_H_
#define TGRL_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tgrl/adam.h"
#include "tgrl/tape.h"

namespace tgrl {

struct GradCheckOptions {
  std::uint64_t seed = 0;
  double step = 1e-5;
  // Coordinates probed per tensor; tensors smaller than this are probed
  // exhaustively. Zero probes every coordinate.
  std::size_t probes_per_tensor = 16;
};

struct GroupError {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t probes = 0;
};

struct GradCheckReport {
  std::vector<GroupError> groups;
  double max_error() const;
};

// Builds a scalar loss on a fresh tape. Called once for the analytic gradient
// and twice per probed coordinate; it must bind the parameters in `params`
// and be a deterministic function of their values.
using LossBuilder = std::function<ad::Var(ad::Tape&)>;

// Compares reverse-mode gradients against central differences. The error of
// one coordinate is |a - n| / max(1e-8, |a| + |n|); each group reports the
// maximum over its probes. Parameter gradients are left zeroed.
GradCheckReport grad_check(std::span<const ParamRef> params,
                           const LossBuilder& build,
                           const GradCheckOptions& options = {});

}  // namespace tgrl

#endif  // TGRL_GRAD_CHECK_H_
