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

#include "tgrl/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace tgrl {

double GradCheckReport::max_error() const {
  double e = 0.0;
  for (const auto& g : groups) e = std::max(e, g.max_rel_error);
  return e;
}

namespace {

double eval_loss(const LossBuilder& build) {
  ad::Tape tape;
  return tape.scalar(build(tape));
}

}  // namespace

GradCheckReport grad_check(std::span<const ParamRef> params,
                           const LossBuilder& build,
                           const GradCheckOptions& options) {
  zero_grads(params);
  {
    ad::Tape tape;
    ad::Var loss = build(tape);
    tape.backward(loss);
  }
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p.tensor->grad);
  zero_grads(params);

  std::mt19937_64 rng(options.seed);
  GradCheckReport report;
  for (std::size_t gi = 0; gi < params.size(); ++gi) {
    Tensor& t = *params[gi].tensor;
    std::vector<std::size_t> coords(t.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.probes_per_tensor > 0 &&
        coords.size() > options.probes_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.probes_per_tensor);
    }

    GroupError ge{params[gi].name, 0.0, coords.size()};
    for (std::size_t k : coords) {
      const double saved = t.data[k];
      t.data[k] = saved + options.step;
      const double up = eval_loss(build);
      t.data[k] = saved - options.step;
      const double down = eval_loss(build);
      t.data[k] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[gi][k];
      const double err = std::fabs(a - numeric) /
                         std::max(1e-8, std::fabs(a) + std::fabs(numeric));
      ge.max_rel_error = std::max(ge.max_rel_error, err);
    }
    report.groups.push_back(std::move(ge));
  }
  return report;
}

}  // namespace tgrl
