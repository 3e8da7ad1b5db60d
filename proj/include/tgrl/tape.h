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

#ifndef TGRL_TAPE_H_
#define TGRL_TAPE_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "tgrl/tensor.h"

namespace tgrl::ad {

// Handle to a node on a Tape. Only meaningful for the tape that created it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

enum class Activation { kNone, kRelu, kTanh, kSigmoid };

// Reverse-mode recording of vector operations.
//
// Nodes are appended in evaluation order, so the node list is always a
// topological order. Parameter leaves alias a caller-owned Tensor: their value
// is the tensor's data and, for trainable leaves, backward() accumulates
// straight into tensor.grad.
// A tape is single-threaded; parameters bound to it must outlive it.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, Var self)>;

  Var constant(std::vector<double> values, std::size_t rows,
               std::size_t cols = 1);
  Var constant(std::span<const double> values) {
    return constant(std::vector<double>(values.begin(), values.end()),
                    values.size());
  }
  Var parameter(Tensor& t);
  // Read-only parameter leaf: gradients reaching it stay on the tape.
  Var frozen(const Tensor& t);

  // Records a new node with the given forward value. `backward` reads the
  // node's gradient and accumulates into its inputs' gradients; it may be
  // empty for nodes that do not propagate.
  Var record(std::vector<double> value, std::size_t rows, std::size_t cols,
             BackwardFn backward);

  std::span<const double> value(Var v) const;
  // Gradient buffer of a node, zero-allocated on first access.
  std::span<double> grad(Var v);
  double scalar(Var v) const;
  // False for constants and frozen parameters.
  bool requires_grad(Var v) const {
    const Node& n = node(v);
    return n.trainable != nullptr || static_cast<bool>(n.backward);
  }
  std::size_t rows(Var v) const { return node(v).rows; }
  std::size_t cols(Var v) const { return node(v).cols; }
  std::size_t size(Var v) const { return node(v).rows * node(v).cols; }

  // Seeds d loss / d loss = 1 and replays the recorded rules in reverse.
  // Intermediate gradients are reset first; parameter gradients accumulate
  // across calls until the caller clears them.
  void backward(Var loss);

  std::size_t num_nodes() const { return nodes_.size(); }

  // grad(w) += g x^T. For trainable leaves the update is queued and applied
  // at the end of backward(), one pass per tensor; otherwise it is immediate.
  void accumulate_outer(Var w, std::span<const double> g, Var x);

 private:
  struct Node {
    std::vector<double> value;
    std::vector<double> grad;
    const Tensor* param = nullptr;
    Tensor* trainable = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;
    BackwardFn backward;
  };
  const Node& node(Var v) const;
  Node& node(Var v);

  struct PendingOuter {
    Tensor* target;
    std::vector<double> g;
    Var x;
  };
  void flush_outer();

  std::vector<Node> nodes_;
  std::vector<PendingOuter> pending_;
};

// y = act(W x + b). W is n_out x n_in.
Var affine(Tape& t, Var x, Var w, Var b, Activation act);
// y = W x.
Var matvec(Tape& t, Var w, Var x);

Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);  // elementwise
Var scale(Tape& t, Var a, double c);
Var shift(Tape& t, Var a, double c);  // a + c
Var activate(Tape& t, Var a, Activation act);
Var one_minus(Tape& t, Var a);
Var concat(Tape& t, std::initializer_list<Var> parts);
Var concat(Tape& t, std::span<const Var> parts);

// Max-subtracted softmax over a vector. NaN input -> NumericError.
Var softmax(Tape& t, Var logits);
// Scalar element i of a vector.
Var pick(Tape& t, Var a, std::size_t i);
// Elementwise ln(max(a, floor)); derivative is zero below the floor.
Var log_clamped(Tape& t, Var a, double floor = 1e-12);
// Scalar -sum_i p_i ln(max(p_i, floor)).
Var entropy(Tape& t, Var p, double floor = 1e-12);
Var square(Tape& t, Var a);
Var abs(Tape& t, Var a);
// Scalar sum of all entries.
Var sum(Tape& t, Var a);
// Sum of a list of same-shaped vars; returns a scalar zero for an empty list.
Var add_n(Tape& t, std::span<const Var> terms);

}  // namespace tgrl::ad

#endif  // TGRL_TAPE_H_
