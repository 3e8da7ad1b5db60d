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

#ifndef TGRL_ADAM_H_
#define TGRL_ADAM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tgrl/tensor.h"

namespace tgrl {

// Non-owning reference to a named parameter tensor.
struct ParamRef {
  std::string name;
  Tensor* tensor = nullptr;
};

// Adam moments for an ordered parameter list. Moments are created lazily on
// the first update, zero-initialized and shape-matched to each parameter.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

// One bias-corrected Adam step over every parameter, then zeroes the grads.
// Throws ContractError if a parameter has no gradient buffer or the list does
// not match the state's layout.
void adam_update(std::span<const ParamRef> params, double lr, AdamState& state);

// Global L2 norm over all parameter gradients.
double grad_norm(std::span<const ParamRef> params);

// Rescales all gradients so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
double clip_grad_norm(std::span<const ParamRef> params, double max_norm);

void zero_grads(std::span<const ParamRef> params);

}  // namespace tgrl

#endif  // TGRL_ADAM_H_
