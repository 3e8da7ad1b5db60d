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

#include <gtest/gtest.h>

#include "test_util.h"
#include "tgrl/gradcheck_agent.h"

namespace tgrl {
namespace {

using ad::Activation;
using ad::Tape;
using ad::Var;

TEST(GradCheckTest, AffineOnlyNetworkIsTight) {
  std::mt19937_64 rng(0);
  Tensor w = testing::random_tensor({6, 5}, rng);
  Tensor b = testing::random_tensor({6}, rng);
  const auto x = testing::random_vec(5, rng);
  std::vector<ParamRef> refs{{"w", &w}, {"b", &b}};
  const LossBuilder build = [&](Tape& t) {
    Var y = affine(t, t.constant(x), t.parameter(w), t.parameter(b),
                   Activation::kNone);
    return sum(t, square(t, y));
  };
  GradCheckOptions opts;
  opts.probes_per_tensor = 0;
  const auto report = grad_check(refs, build, opts);
  ASSERT_EQ(report.groups.size(), 2u);
  EXPECT_EQ(report.groups[0].probes, 30u);
  EXPECT_LT(report.max_error(), 1e-6);
  EXPECT_EQ(w.grad, std::vector<double>(30, 0.0));
}

// y = 2x with a backward rule that claims dy/dx = 2.5.
Var corrupted_double(Tape& t, Var x) {
  auto xv = t.value(x);
  std::vector<double> y(xv.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 2.0 * xv[i];
  return t.record(std::move(y), xv.size(), 1, [x](Tape& tp, Var self) {
    auto gy = tp.grad(self);
    auto gx = tp.grad(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += 2.5 * gy[i];
  });
}

TEST(GradCheckTest, CorruptedRuleIsReported) {
  std::mt19937_64 rng(3);
  Tensor w = testing::random_tensor({4, 3}, rng);
  const auto x = testing::random_vec(3, rng);
  std::vector<ParamRef> refs{{"w", &w}};
  const LossBuilder build = [&](Tape& t) {
    Var y = matvec(t, t.parameter(w), t.constant(x));
    return sum(t, square(t, corrupted_double(t, y)));
  };
  EXPECT_GT(grad_check(refs, build).max_error(), 1e-2);
}

TEST(GradCheckTest, ProbeCountIsCapped) {
  Tensor w({40, 40});
  std::vector<ParamRef> refs{{"w", &w}};
  const LossBuilder build = [&](Tape& t) {
    return sum(t, square(t, t.parameter(w)));
  };
  GradCheckOptions opts;
  opts.probes_per_tensor = 7;
  EXPECT_EQ(grad_check(refs, build, opts).groups[0].probes, 7u);
}

TEST(AgentGradCheckTest, FullAgentSeedZero) {
  const auto report = agent_grad_check(0);
  EXPECT_FALSE(report.groups.empty());
  for (const auto& g : report.groups)
    EXPECT_LT(g.max_rel_error, kAgentGradTolerance) << g.name;
}

TEST(AgentGradCheckTest, WithoutLocationFeature) {
  AgentConfig cfg;
  cfg.use_location = false;
  const auto report = agent_grad_check(4, cfg);
  for (const auto& g : report.groups) {
    EXPECT_EQ(g.name.rfind("loc_enc", 0), std::string::npos);
    EXPECT_LT(g.max_rel_error, kAgentGradTolerance) << g.name;
  }
}

}  // namespace
}  // namespace tgrl
