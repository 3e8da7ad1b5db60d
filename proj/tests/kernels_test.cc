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

#include "tgrl/kernels.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace tgrl::kernels {
namespace {

using testing::random_vec;

struct Shape {
  std::size_t rows, cols;
};

class KernelTest : public ::testing::TestWithParam<Shape> {};

TEST_P(KernelTest, MatvecSerialMatchesOmpAndOracle) {
  const auto [r, c] = GetParam();
  std::mt19937_64 rng(r * 131 + c);
  const auto w = random_vec(r * c, rng);
  const auto x = random_vec(c, rng);
  std::vector<double> ys(r), yo(r);
  matvec_serial(w, r, c, x, ys);
  matvec_omp(w, r, c, x, yo);
  EXPECT_EQ(ys, yo);
  for (std::size_t i = 0; i < r; ++i) {
    long double s = 0;
    for (std::size_t j = 0; j < c; ++j) s += static_cast<long double>(w[i * c + j]) * x[j];
    EXPECT_NEAR(ys[i], static_cast<double>(s), 1e-12 * (1.0 + c));
  }
}

TEST_P(KernelTest, TransposeAccumSerialMatchesOmpAndOracle) {
  const auto [r, c] = GetParam();
  std::mt19937_64 rng(r * 17 + c);
  const auto w = random_vec(r * c, rng);
  auto g = random_vec(r, rng);
  if (r > 1) g[1] = 0.0;  // skipped rows must not matter
  const auto base = random_vec(c, rng);
  auto gs = base, go = base;
  matvec_t_accum_serial(w, r, c, g, gs);
  matvec_t_accum_omp(w, r, c, g, go);
  EXPECT_EQ(gs, go);
  for (std::size_t j = 0; j < c; ++j) {
    long double s = base[j];
    for (std::size_t i = 0; i < r; ++i) s += static_cast<long double>(w[i * c + j]) * g[i];
    EXPECT_NEAR(gs[j], static_cast<double>(s), 1e-12 * (1.0 + r));
  }
}

TEST_P(KernelTest, OuterAccumSerialMatchesOmpAndOracle) {
  const auto [r, c] = GetParam();
  std::mt19937_64 rng(r * 7 + c);
  const auto g = random_vec(r, rng);
  const auto x = random_vec(c, rng);
  const auto base = random_vec(r * c, rng);
  auto ws = base, wo = base;
  outer_accum_serial(ws, r, c, g, x);
  outer_accum_omp(wo, r, c, g, x);
  EXPECT_EQ(ws, wo);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      // One rounding of the sum, possibly fused.
      const double b = base[i * c + j], p = g[i] * x[j];
      EXPECT_NEAR(ws[i * c + j], b + p,
                  4e-16 * (std::fabs(b) + std::fabs(p)));
    }
}

TEST_P(KernelTest, OuterBatchEqualsSuccessiveOuterCalls) {
  const auto [r, c] = GetParam();
  std::mt19937_64 rng(r * 3 + c);
  std::vector<std::vector<double>> gs, xs;
  for (int k = 0; k < 11; ++k) {
    gs.push_back(random_vec(r, rng));
    xs.push_back(random_vec(c, rng));
  }
  gs[3][0] = 0.0;
  std::vector<const double*> gp, xp;
  for (int k = 0; k < 11; ++k) {
    gp.push_back(gs[k].data());
    xp.push_back(xs[k].data());
  }
  const auto base = random_vec(r * c, rng);
  auto seq = base, bs = base, bo = base;
  for (int k = 0; k < 11; ++k) outer_accum_serial(seq, r, c, gs[k], xs[k]);
  outer_accum_batch_serial(bs, r, c, gp, xp);
  outer_accum_batch_omp(bo, r, c, gp, xp);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_NEAR(bs[i], seq[i], 1e-12);
  }
  EXPECT_EQ(bs, bo);
}

TEST_P(KernelTest, MeanRowsSerialMatchesOmp) {
  const auto [r, c] = GetParam();
  std::mt19937_64 rng(r + c);
  const auto rows = random_vec(r * c, rng);
  std::vector<double> ms(c), mo(c);
  const std::size_t first = r / 3;
  const std::size_t count = r - first;
  mean_rows_serial(rows, c, first, count, ms);
  mean_rows_omp(rows, c, first, count, mo);
  for (std::size_t k = 0; k < c; ++k) {
    double s = 0.0;
    for (std::size_t i = first; i < first + count; ++i) s += rows[i * c + k];
    EXPECT_NEAR(ms[k], s / static_cast<double>(count), 1e-12);
    EXPECT_NEAR(mo[k], ms[k], 1e-15);
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, KernelTest,
                         ::testing::Values(Shape{1, 1}, Shape{3, 5},
                                           Shape{7, 130}, Shape{128, 272},
                                           Shape{301, 257}, Shape{513, 129}),
                         [](const auto& info) {
                           return std::to_string(info.param.rows) + "x" +
                                  std::to_string(info.param.cols);
                         });

TEST(KernelDispatchTest, LargeDispatchMatchesSerial) {
  std::mt19937_64 rng(1);
  const std::size_t r = 512, c = 256;  // above the parallel threshold
  const auto w = random_vec(r * c, rng);
  const auto x = random_vec(c, rng);
  std::vector<double> a(r), b(r);
  matvec(w, r, c, x, a);
  matvec_serial(w, r, c, x, b);
  EXPECT_EQ(a, b);
}

TEST(KernelDispatchTest, MeanOfEmptyRangeIsZero) {
  std::vector<double> rows{1.0, 2.0};
  std::vector<double> out{5.0, 5.0};
  mean_rows(rows, 2, 0, 0, out);
  EXPECT_EQ(out, (std::vector<double>{0.0, 0.0}));
}

}  // namespace
}  // namespace tgrl::kernels
