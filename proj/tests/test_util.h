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

#ifndef TGRL_TESTS_TEST_UTIL_H_
#define TGRL_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tgrl/tape.h"
#include "tgrl/tensor.h"

namespace tgrl::testing {

inline Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng,
                            double scale = 1.0) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> n(0.0, scale);
  for (auto& v : t.data) v = n(rng);
  return t;
}

inline std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng,
                                      double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

using ScalarFn = std::function<ad::Var(ad::Tape&)>;

// Worst relative error between backward() and a central difference over
// every coordinate of every tensor.
inline double fd_max_rel_error(std::vector<Tensor*> params, const ScalarFn& f,
                               double h = 1e-5) {
  for (Tensor* p : params) {
    p->ensure_grad();
    p->zero_grad();
  }
  {
    ad::Tape tape;
    tape.backward(f(tape));
  }
  double worst = 0.0;
  for (Tensor* p : params) {
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double keep = p->data[i];
      p->data[i] = keep + h;
      double up;
      {
        ad::Tape t;
        up = t.scalar(f(t));
      }
      p->data[i] = keep - h;
      double down;
      {
        ad::Tape t;
        down = t.scalar(f(t));
      }
      p->data[i] = keep;
      const double num = (up - down) / (2.0 * h);
      const double ana = p->grad[i];
      const double err =
          std::fabs(ana - num) / std::max(1e-6, std::fabs(ana) + std::fabs(num));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace tgrl::testing

#endif  // TGRL_TESTS_TEST_UTIL_H_
