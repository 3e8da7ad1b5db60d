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

#include "tgrl/tape.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "tgrl/kernels.h"

namespace tgrl::ad {

// ---------------------------------------------------------------------------
// Tape

const Tape::Node& Tape::node(Var v) const {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size())
    throw ContractError("tape: invalid variable handle");
  return nodes_[static_cast<std::size_t>(v.id)];
}

Tape::Node& Tape::node(Var v) {
  return const_cast<Node&>(std::as_const(*this).node(v));
}

Var Tape::constant(std::vector<double> values, std::size_t rows,
                   std::size_t cols) {
  if (values.size() != rows * cols)
    throw DimensionError("tape constant: value length does not match shape");
  return record(std::move(values), rows, cols, nullptr);
}

Var Tape::parameter(Tensor& t) {
  Var v = frozen(t);
  nodes_.back().trainable = &t;
  return v;
}

Var Tape::frozen(const Tensor& t) {
  t.validate();
  Node n;
  n.param = &t;
  n.rows = t.rows();
  n.cols = t.cols();
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size() - 1)};
}

Var Tape::record(std::vector<double> value, std::size_t rows,
                 std::size_t cols, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.rows = rows;
  n.cols = cols;
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size() - 1)};
}

std::span<const double> Tape::value(Var v) const {
  const Node& n = node(v);
  if (n.param) return n.param->data;
  return n.value;
}

std::span<double> Tape::grad(Var v) {
  Node& n = node(v);
  if (n.trainable) return n.trainable->ensure_grad();
  const std::size_t len = n.rows * n.cols;
  if (n.grad.size() != len) n.grad.assign(len, 0.0);
  return n.grad;
}

double Tape::scalar(Var v) const {
  auto val = value(v);
  if (val.size() != 1) throw ContractError("tape: value is not a scalar");
  return val[0];
}

void Tape::backward(Var loss) {
  if (size(loss) != 1)
    throw ContractError("backward: loss must be a scalar, got " +
                        std::to_string(size(loss)) + " entries");
  for (auto& n : nodes_)
    if (!n.trainable) std::fill(n.grad.begin(), n.grad.end(), 0.0);
  pending_.clear();
  grad(loss)[0] += 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.backward || n.grad.empty()) continue;
    n.backward(*this, Var{id});
  }
  flush_outer();
}

void Tape::accumulate_outer(Var w, std::span<const double> g, Var x) {
  Node& n = node(w);
  if (!n.trainable) {
    kernels::outer_accum(grad(w), n.rows, n.cols, g, value(x));
    return;
  }
  pending_.push_back(
      PendingOuter{n.trainable, std::vector<double>(g.begin(), g.end()), x});
}

void Tape::flush_outer() {
  // Group by target in first-use order; within a group keep replay order.
  std::vector<Tensor*> targets;
  for (const auto& p : pending_)
    if (std::find(targets.begin(), targets.end(), p.target) == targets.end())
      targets.push_back(p.target);
  std::vector<const double*> gs;
  std::vector<const double*> xs;
  for (Tensor* target : targets) {
    gs.clear();
    xs.clear();
    for (const auto& p : pending_) {
      if (p.target != target) continue;
      gs.push_back(p.g.data());
      xs.push_back(value(p.x).data());
    }
    kernels::outer_accum_batch(target->ensure_grad(), target->rows(),
                               target->cols(), gs, xs);
  }
  pending_.clear();
}

// ---------------------------------------------------------------------------
// Operations

namespace {

void require(bool ok, const char* op, const std::string& detail) {
  if (!ok) throw DimensionError(std::string(op) + ": " + detail);
}

std::string dims(std::size_t a, std::size_t b) {
  return std::to_string(a) + " vs " + std::to_string(b);
}

inline double apply_act(double z, Activation act) {
  switch (act) {
    case Activation::kNone:
      return z;
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kTanh:
      return std::tanh(z);
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

// Derivative expressed through the activation output y.
inline double act_grad_from_output(double y, Activation act) {
  switch (act) {
    case Activation::kNone:
      return 1.0;
    case Activation::kRelu:
      return y > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh:
      return 1.0 - y * y;
    case Activation::kSigmoid:
      return y * (1.0 - y);
  }
  return 1.0;
}

}  // namespace

Var affine(Tape& t, Var x, Var w, Var b, Activation act) {
  const std::size_t n_out = t.rows(w);
  const std::size_t n_in = t.cols(w);
  require(t.size(x) == n_in, "affine", "input length " + dims(t.size(x), n_in));
  require(t.size(b) == n_out, "affine", "bias length " + dims(t.size(b), n_out));
  std::vector<double> y(n_out);
  kernels::matvec(t.value(w), n_out, n_in, t.value(x), y);
  auto bv = t.value(b);
  for (std::size_t i = 0; i < n_out; ++i) y[i] = apply_act(y[i] + bv[i], act);
  return t.record(std::move(y), n_out, 1,
                  [x, w, b, act, n_out, n_in](Tape& tp, Var self) {
                    auto gy = tp.grad(self);
                    auto yv = tp.value(self);
                    std::vector<double> gz(n_out);
                    for (std::size_t i = 0; i < n_out; ++i)
                      gz[i] = gy[i] * act_grad_from_output(yv[i], act);
                    auto gb = tp.grad(b);
                    for (std::size_t i = 0; i < n_out; ++i) gb[i] += gz[i];
                    tp.accumulate_outer(w, gz, x);
                    if (tp.requires_grad(x))
                      kernels::matvec_t_accum(tp.value(w), n_out, n_in, gz,
                                              tp.grad(x));
                  });
}

Var matvec(Tape& t, Var w, Var x) {
  const std::size_t n_out = t.rows(w);
  const std::size_t n_in = t.cols(w);
  require(t.size(x) == n_in, "matvec", "input length " + dims(t.size(x), n_in));
  std::vector<double> y(n_out);
  kernels::matvec(t.value(w), n_out, n_in, t.value(x), y);
  return t.record(std::move(y), n_out, 1,
                  [x, w, n_out, n_in](Tape& tp, Var self) {
                    auto gy = tp.grad(self);
                    tp.accumulate_outer(w, gy, x);
                    if (tp.requires_grad(x))
                      kernels::matvec_t_accum(tp.value(w), n_out, n_in, gy,
                                              tp.grad(x));
                  });
}

namespace {

template <typename Fwd, typename Bwd>
Var binary(Tape& t, Var a, Var b, const char* name, Fwd fwd, Bwd bwd) {
  const std::size_t n = t.size(a);
  require(t.size(b) == n, name, dims(n, t.size(b)));
  auto av = t.value(a);
  auto bv = t.value(b);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = fwd(av[i], bv[i]);
  return t.record(std::move(y), t.rows(a), t.cols(a),
                  [a, b, n, bwd](Tape& tp, Var self) {
                    auto gy = tp.grad(self);
                    auto ga = tp.grad(a);
                    auto gb = tp.grad(b);
                    auto av2 = tp.value(a);
                    auto bv2 = tp.value(b);
                    for (std::size_t i = 0; i < n; ++i)
                      bwd(gy[i], av2[i], bv2[i], ga[i], gb[i]);
                  });
}

// Elementwise unary op whose derivative is a function of (input, output).
template <typename Fwd, typename Deriv>
Var unary(Tape& t, Var a, Fwd fwd, Deriv deriv) {
  const std::size_t n = t.size(a);
  auto av = t.value(a);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = fwd(av[i]);
  return t.record(std::move(y), t.rows(a), t.cols(a),
                  [a, n, deriv](Tape& tp, Var self) {
                    auto gy = tp.grad(self);
                    auto yv = tp.value(self);
                    auto av2 = tp.value(a);
                    auto ga = tp.grad(a);
                    for (std::size_t i = 0; i < n; ++i)
                      ga[i] += gy[i] * deriv(av2[i], yv[i]);
                  });
}

}  // namespace

Var add(Tape& t, Var a, Var b) {
  return binary(
      t, a, b, "add", [](double x, double y) { return x + y; },
      [](double g, double, double, double& ga, double& gb) {
        ga += g;
        gb += g;
      });
}

Var sub(Tape& t, Var a, Var b) {
  return binary(
      t, a, b, "sub", [](double x, double y) { return x - y; },
      [](double g, double, double, double& ga, double& gb) {
        ga += g;
        gb -= g;
      });
}

Var mul(Tape& t, Var a, Var b) {
  return binary(
      t, a, b, "mul", [](double x, double y) { return x * y; },
      [](double g, double x, double y, double& ga, double& gb) {
        ga += g * y;
        gb += g * x;
      });
}

Var scale(Tape& t, Var a, double c) {
  return unary(
      t, a, [c](double x) { return c * x; },
      [c](double, double) { return c; });
}

Var shift(Tape& t, Var a, double c) {
  return unary(
      t, a, [c](double x) { return x + c; },
      [](double, double) { return 1.0; });
}

Var activate(Tape& t, Var a, Activation act) {
  return unary(
      t, a, [act](double x) { return apply_act(x, act); },
      [act](double, double y) { return act_grad_from_output(y, act); });
}

Var one_minus(Tape& t, Var a) {
  return unary(
      t, a, [](double x) { return 1.0 - x; },
      [](double, double) { return -1.0; });
}

Var concat(Tape& t, std::initializer_list<Var> parts) {
  return concat(t, std::span<const Var>(parts.begin(), parts.size()));
}

Var concat(Tape& t, std::span<const Var> parts) {
  std::vector<double> y;
  std::vector<Var> ins(parts.begin(), parts.end());
  for (Var p : ins) {
    auto v = t.value(p);
    y.insert(y.end(), v.begin(), v.end());
  }
  const std::size_t n = y.size();
  return t.record(std::move(y), n, 1, [ins](Tape& tp, Var self) {
    auto gy = tp.grad(self);
    std::size_t off = 0;
    for (Var p : ins) {
      auto gp = tp.grad(p);
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += gy[off + i];
      off += gp.size();
    }
  });
}

Var softmax(Tape& t, Var logits) {
  auto z = t.value(logits);
  const std::size_t k = z.size();
  if (k == 0) throw ContractError("softmax: empty input");
  double mx = z[0];
  for (double v : z) {
    if (std::isnan(v)) throw NumericError("softmax: NaN logit");
    mx = std::max(mx, v);
  }
  std::vector<double> y(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    y[i] = std::exp(z[i] - mx);
    total += y[i];
  }
  for (auto& v : y) v /= total;
  return t.record(std::move(y), t.rows(logits), t.cols(logits),
                  [logits, k](Tape& tp, Var self) {
                    auto gy = tp.grad(self);
                    auto yv = tp.value(self);
                    double dot = 0.0;
                    for (std::size_t i = 0; i < k; ++i) dot += gy[i] * yv[i];
                    auto gz = tp.grad(logits);
                    for (std::size_t i = 0; i < k; ++i)
                      gz[i] += yv[i] * (gy[i] - dot);
                  });
}

Var pick(Tape& t, Var a, std::size_t i) {
  require(i < t.size(a), "pick", "index out of range");
  std::vector<double> y{t.value(a)[i]};
  return t.record(std::move(y), 1, 1, [a, i](Tape& tp, Var self) {
    tp.grad(a)[i] += tp.grad(self)[0];
  });
}

Var log_clamped(Tape& t, Var a, double floor) {
  return unary(
      t, a, [floor](double x) { return std::log(std::max(x, floor)); },
      [floor](double x, double) { return x >= floor ? 1.0 / x : 0.0; });
}

Var entropy(Tape& t, Var p, double floor) {
  auto pv = t.value(p);
  double h = 0.0;
  for (double v : pv) h -= v * std::log(std::max(v, floor));
  return t.record({h}, 1, 1, [p, floor](Tape& tp, Var self) {
    const double g = tp.grad(self)[0];
    auto pv2 = tp.value(p);
    auto gp = tp.grad(p);
    for (std::size_t i = 0; i < pv2.size(); ++i) {
      const double d = pv2[i] >= floor ? -(std::log(pv2[i]) + 1.0)
                                       : -std::log(floor);
      gp[i] += g * d;
    }
  });
}

Var square(Tape& t, Var a) {
  return unary(
      t, a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Var abs(Tape& t, Var a) {
  return unary(
      t, a, [](double x) { return std::fabs(x); },
      [](double x, double) {
        return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      });
}

Var sum(Tape& t, Var a) {
  double s = 0.0;
  for (double v : t.value(a)) s += v;
  return t.record({s}, 1, 1, [a](Tape& tp, Var self) {
    const double g = tp.grad(self)[0];
    for (auto& ga : tp.grad(a)) ga += g;
  });
}

Var add_n(Tape& t, std::span<const Var> terms) {
  if (terms.empty()) return t.constant({0.0}, 1);
  Var acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) acc = add(t, acc, terms[i]);
  return acc;
}

}  // namespace tgrl::ad
