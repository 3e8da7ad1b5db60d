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

#ifndef TGRL_TENSOR_H_
#define TGRL_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tgrl/errors.h"

namespace tgrl {

// Dense row-major array of doubles with an optional gradient buffer.
// Vectors have shape {n}; matrices {rows, cols}.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty means "no gradient"

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims);
  Tensor(std::vector<std::size_t> dims, std::vector<double> values);

  std::size_t size() const { return data.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  bool has_grad() const { return !grad.empty(); }
  // Allocates a zeroed gradient if absent.
  std::span<double> ensure_grad();
  void zero_grad();

  // Throws DimensionError unless product(shape) == data.size() and every
  // extent is positive, and grad is empty or data-sized.
  void validate(const std::string& name = "tensor") const;
};

std::size_t shape_product(std::span<const std::size_t> dims);

}  // namespace tgrl

#endif  // TGRL_TENSOR_H_
