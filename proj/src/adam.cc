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

#include "tgrl/errors.h"

namespace tgrl {

void adam_update(std::span<const ParamRef> params, double lr,
                 AdamState& state) {
  for (const auto& p : params)
    if (!p.tensor || !p.tensor->has_grad())
      throw ContractError("adam_update: missing gradient for " + p.name);

  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i].tensor->size(), 0.0);
      state.v[i].assign(params[i].tensor->size(), 0.0);
    }
  }
  if (state.m.size() != params.size())
    throw ContractError("adam_update: parameter list does not match state");

  ++state.step;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

  const double step_size = lr / c1;
  const double inv_sqrt_c2 = 1.0 / std::sqrt(c2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = *params[i].tensor;
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != t.size())
      throw ContractError("adam_update: moment shape mismatch for " +
                          params[i].name);
    double* __restrict data = t.data.data();
    double* __restrict grad = t.grad.data();
    double* __restrict mp = m.data();
    double* __restrict vp = v.data();
    const std::size_t n = t.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double g = grad[k];
      mp[k] = b1 * mp[k] + (1.0 - b1) * g;
      vp[k] = b2 * vp[k] + (1.0 - b2) * g * g;
      data[k] -= step_size * mp[k] / (std::sqrt(vp[k]) * inv_sqrt_c2 + state.eps);
      grad[k] = 0.0;
    }
  }
}

double grad_norm(std::span<const ParamRef> params) {
  // Eight lanes summed in a fixed order, so the loop vectorizes and the
  // result does not depend on the build.
  double lane[8] = {};
  for (const auto& p : params) {
    const double* g = p.tensor->grad.data();
    const std::size_t n = p.tensor->grad.size();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8)
      for (int j = 0; j < 8; ++j) lane[j] += g[k + j] * g[k + j];
    for (; k < n; ++k) lane[0] += g[k] * g[k];
  }
  const double s = ((lane[0] + lane[1]) + (lane[2] + lane[3])) +
                   ((lane[4] + lane[5]) + (lane[6] + lane[7]));
  return std::sqrt(s);
}

double clip_grad_norm(std::span<const ParamRef> params, double max_norm) {
  const double norm = grad_norm(params);
  if (norm > max_norm && norm > 0.0) {
    const double f = max_norm / norm;
    for (const auto& p : params)
      for (auto& g : p.tensor->grad) g *= f;
  }
  return norm;
}

void zero_grads(std::span<const ParamRef> params) {
  for (const auto& p : params) {
    p.tensor->ensure_grad();
    p.tensor->zero_grad();
  }
}

}  // namespace tgrl
