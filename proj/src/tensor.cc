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

#include "tgrl/tensor.h"

#include <algorithm>
#include <utility>

namespace tgrl {

std::size_t shape_product(std::span<const std::size_t> dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> dims)
    : shape(std::move(dims)), data(shape_product(shape), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<double> values)
    : shape(std::move(dims)), data(std::move(values)) {
  validate();
}

std::span<double> Tensor::ensure_grad() {
  if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  return grad;
}

void Tensor::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

void Tensor::validate(const std::string& name) const {
  if (shape.empty())
    throw DimensionError(name + ": empty shape");
  for (auto d : shape)
    if (d == 0) throw DimensionError(name + ": zero extent in shape");
  if (shape_product(shape) != data.size())
    throw DimensionError(name + ": shape product " +
                         std::to_string(shape_product(shape)) +
                         " != data length " + std::to_string(data.size()));
  if (!grad.empty() && grad.size() != data.size())
    throw DimensionError(name + ": grad length mismatch");
}

}  // namespace tgrl
