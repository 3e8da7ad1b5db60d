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

#include "tgrl/adam.h"

#include <cmath>

#include <gtest/gtest.h>

#include "tgrl/errors.h"
#include "tgrl/tape.h"

namespace tgrl {
namespace {

TEST(AdamTest, ZeroGradientIsNoOp) {
  Tensor p({3}, {0.5, -1.0, 2.0});
  p.ensure_grad();
  std::vector<ParamRef> refs{{"p", &p}};
  AdamState st;
  for (int i = 0; i < 5; ++i) adam_update(refs, 1e-3, st);
  EXPECT_EQ(p.data, (std::vector<double>{0.5, -1.0, 2.0}));
  EXPECT_EQ(st.step, 5);
}

TEST(AdamTest, FirstStepIsLrTimesSign) {
  const double lr = 1e-3;
  for (double g : {1e-6, 0.3, -4.0, 250.0, -1e-3}) {
    Tensor p({1}, {1.0});
    p.ensure_grad()[0] = g;
    std::vector<ParamRef> refs{{"p", &p}};
    AdamState st;
    adam_update(refs, lr, st);
    const double delta = p.data[0] - 1.0;
    EXPECT_NEAR(delta, -lr * g / (std::fabs(g) + st.eps), 1e-14) << g;
    if (std::fabs(g) > 1e-4)
      EXPECT_NEAR(delta, -lr * (g > 0 ? 1.0 : -1.0), lr * 1e-3) << g;
  }
}

TEST(AdamTest, MatchesScalarReference) {
  // Textbook bias-corrected recursion, written out independently.
  Tensor p({2}, {0.3, -0.7});
  std::vector<ParamRef> refs{{"p", &p}};
  AdamState st;
  double ref[2] = {0.3, -0.7}, m[2] = {0, 0}, v[2] = {0, 0};
  const double lr = 0.01;
  for (int step = 1; step <= 20; ++step) {
    const double g[2] = {std::sin(step * 1.0), std::cos(step * 0.3) * 2.0};
    p.ensure_grad()[0] = g[0];
    p.grad[1] = g[1];
    adam_update(refs, lr, st);
    for (int i = 0; i < 2; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(0.9, step));
      const double vh = v[i] / (1 - std::pow(0.999, step));
      ref[i] -= lr * mh / (std::sqrt(vh) + 1e-8);
      EXPECT_NEAR(p.data[i], ref[i], 1e-12);
    }
  }
}

TEST(AdamTest, ConvergesOnQuadratic) {
  Tensor p({1}, {-3.0});
  std::vector<ParamRef> refs{{"p", &p}};
  AdamState st;
  for (int i = 0; i < 3000; ++i) {
    ad::Tape t;
    t.backward(ad::sum(t, ad::square(t, ad::shift(t, t.parameter(p), -1.0))));
    adam_update(refs, 0.05, st);
  }
  EXPECT_NEAR(p.data[0], 1.0, 1e-3);
}

TEST(AdamTest, ZeroesGradientsAfterStep) {
  Tensor p({2}, {1.0, 1.0});
  p.ensure_grad()[0] = 3.0;
  std::vector<ParamRef> refs{{"p", &p}};
  AdamState st;
  adam_update(refs, 1e-3, st);
  EXPECT_EQ(p.grad, (std::vector<double>{0.0, 0.0}));
}

TEST(AdamTest, MissingGradIsContractError) {
  Tensor p({2}, {1.0, 1.0});
  std::vector<ParamRef> refs{{"p", &p}};
  AdamState st;
  EXPECT_THROW(adam_update(refs, 1e-3, st), ContractError);
}

TEST(AdamTest, LayoutChangeIsContractError) {
  Tensor a({2}), b({3});
  a.ensure_grad();
  b.ensure_grad();
  AdamState st;
  std::vector<ParamRef> one{{"a", &a}};
  adam_update(one, 1e-3, st);
  std::vector<ParamRef> two{{"a", &a}, {"b", &b}};
  EXPECT_THROW(adam_update(two, 1e-3, st), ContractError);
}

TEST(ClipTest, RescalesToMaxNorm) {
  Tensor a({2}), b({1});
  a.ensure_grad()[0] = 3.0;
  a.grad[1] = 0.0;
  b.ensure_grad()[0] = 4.0;
  std::vector<ParamRef> refs{{"a", &a}, {"b", &b}};
  EXPECT_DOUBLE_EQ(grad_norm(refs), 5.0);
  EXPECT_DOUBLE_EQ(clip_grad_norm(refs, 1.0), 5.0);
  EXPECT_NEAR(grad_norm(refs), 1.0, 1e-15);
  EXPECT_NEAR(a.grad[0], 0.6, 1e-15);
  EXPECT_NEAR(b.grad[0], 0.8, 1e-15);
  // Already inside the ball: untouched.
  EXPECT_NEAR(clip_grad_norm(refs, 2.0), 1.0, 1e-15);
  EXPECT_NEAR(b.grad[0], 0.8, 1e-15);
}

TEST(ClipTest, NormOfLongVectorMatchesLoop) {
  Tensor a({1001});
  auto g = a.ensure_grad();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = std::sin(static_cast<double>(i));
    s += g[i] * g[i];
  }
  std::vector<ParamRef> refs{{"a", &a}};
  EXPECT_NEAR(grad_norm(refs), std::sqrt(s), 1e-12);
}

}  // namespace
}  // namespace tgrl
