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

#include "tgrl/agent.h"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "tgrl/config_io.h"
#include "tgrl/env.h"
#include "tgrl/errors.h"

namespace tgrl {

using ad::Activation;
using ad::Tape;
using ad::Var;
using nlohmann::json;

AgentConfig AgentConfig::desk(std::size_t query_dim, std::size_t video_dim) {
  AgentConfig c;
  c.query_dim = query_dim;
  c.video_dim = video_dim;
  return c;
}

AgentConfig AgentConfig::paper(std::size_t query_dim, std::size_t video_dim) {
  AgentConfig c;
  c.query_dim = query_dim;
  c.video_dim = video_dim;
  c.query_enc = 1024;
  c.video_enc = 512;
  c.location_enc = 128;
  c.state_dim = 1024;
  c.hidden_dim = 1024;
  return c;
}

void AgentConfig::validate() const {
  if (query_dim == 0 || video_dim == 0 || query_enc == 0 || video_enc == 0 ||
      location_enc == 0 || state_dim == 0 || hidden_dim == 0)
    throw ConfigError("agent config: all layer sizes must be positive");
}

// ---------------------------------------------------------------------------
// Parameters

namespace {

template <typename Fn>
void for_each_tensor(ModelParams& p, Fn&& fn) {
  auto dense = [&](const char* prefix, DenseParams& d) {
    fn(std::string(prefix) + ".weight", d.weight);
    fn(std::string(prefix) + ".bias", d.bias);
  };
  dense("query_enc", p.query_enc);
  dense("global_enc", p.global_enc);
  dense("local_enc", p.local_enc);
  if (p.use_location) dense("loc_enc", p.loc_enc);
  dense("fusion", p.fusion);
  fn("gru.w_z", p.gru.w_z);
  fn("gru.u_z", p.gru.u_z);
  fn("gru.b_z", p.gru.b_z);
  fn("gru.w_r", p.gru.w_r);
  fn("gru.u_r", p.gru.u_r);
  fn("gru.b_r", p.gru.b_r);
  fn("gru.w_h", p.gru.w_h);
  fn("gru.u_h", p.gru.u_h);
  fn("gru.b_h", p.gru.b_h);
  dense("policy_head", p.policy_head);
  dense("value_head", p.value_head);
  dense("tiou_head", p.tiou_head);
  dense("loc_head", p.loc_head);
}

}  // namespace

std::vector<ParamRef> ModelParams::refs() {
  std::vector<ParamRef> out;
  for_each_tensor(*this, [&](std::string name, Tensor& t) {
    out.push_back(ParamRef{std::move(name), &t});
  });
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for_each_tensor(const_cast<ModelParams&>(*this),
                  [&](std::string name, Tensor& t) {
                    out.emplace_back(std::move(name), &t);
                  });
  return out;
}

ParamSet param_set(std::string_view name) {
  if (name.starts_with("value_head.")) return ParamSet::kCritic;
  if (name.starts_with("tiou_head.") || name.starts_with("loc_head."))
    return ParamSet::kSupervised;
  return ParamSet::kActor;
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> param_layout(
    const AgentConfig& cfg) {
  ModelParams p = zero_params(cfg);
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  for (const auto& r : p.refs()) out.emplace_back(r.name, r.tensor->shape);
  return out;
}

ModelParams zero_params(const AgentConfig& cfg) {
  cfg.validate();
  auto dense = [](std::size_t out, std::size_t in) {
    return DenseParams{Tensor({out, in}), Tensor({out})};
  };
  const std::size_t h = cfg.hidden_dim;
  const std::size_t s = cfg.state_dim;
  ModelParams p;
  p.use_location = cfg.use_location;
  p.query_enc = dense(cfg.query_enc, cfg.query_dim);
  p.global_enc = dense(cfg.video_enc, cfg.video_dim);
  p.local_enc = dense(cfg.video_enc, cfg.video_dim);
  if (cfg.use_location) p.loc_enc = dense(cfg.location_enc, 2);
  const std::size_t fused = cfg.query_enc + 2 * cfg.video_enc +
                            (cfg.use_location ? cfg.location_enc : 0);
  p.fusion = dense(s, fused);
  p.gru.w_z = Tensor({h, s});
  p.gru.u_z = Tensor({h, h});
  p.gru.b_z = Tensor({h});
  p.gru.w_r = Tensor({h, s});
  p.gru.u_r = Tensor({h, h});
  p.gru.b_r = Tensor({h});
  p.gru.w_h = Tensor({h, s});
  p.gru.u_h = Tensor({h, h});
  p.gru.b_h = Tensor({h});
  p.policy_head = dense(7, h);
  p.value_head = dense(1, h);
  p.tiou_head = dense(1, h);
  p.loc_head = dense(2, h);
  return p;
}

ModelParams init_params(const AgentConfig& cfg, Rng& rng) {
  ModelParams p = zero_params(cfg);
  for (auto& r : p.refs()) {
    Tensor& t = *r.tensor;
    if (t.shape.size() != 2) continue;  // biases stay zero
    const double fan_out = static_cast<double>(t.shape[0]);
    const double fan_in = static_cast<double>(t.shape[1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (auto& v : t.data) v = u(rng);
  }
  return p;
}

double checksum(const ModelParams& params) {
  double s = 0.0;
  double w = 1.0;
  for (const auto& [name, t] : params.named()) {
    for (double v : t->data) {
      s += w * v;
      w = w < 1e3 ? w + 1e-3 : 1.0;
    }
  }
  return s;
}

namespace {

BoundDense bind_dense(Tape& t, const DenseParams& d, bool trainable) {
  if (trainable) {
    auto& m = const_cast<DenseParams&>(d);
    return {t.parameter(m.weight), t.parameter(m.bias)};
  }
  return {t.frozen(d.weight), t.frozen(d.bias)};
}

BoundParams bind_impl(Tape& t, const ModelParams& p, bool trainable) {
  auto leaf = [&](const Tensor& x) {
    return trainable ? t.parameter(const_cast<Tensor&>(x)) : t.frozen(x);
  };
  BoundParams b;
  b.use_location = p.use_location;
  b.query_enc = bind_dense(t, p.query_enc, trainable);
  b.global_enc = bind_dense(t, p.global_enc, trainable);
  b.local_enc = bind_dense(t, p.local_enc, trainable);
  if (p.use_location) b.loc_enc = bind_dense(t, p.loc_enc, trainable);
  b.fusion = bind_dense(t, p.fusion, trainable);
  const GruParams& g = p.gru;
  b.gru = {leaf(g.w_z), leaf(g.u_z), leaf(g.b_z), leaf(g.w_r), leaf(g.u_r),
           leaf(g.b_r), leaf(g.w_h), leaf(g.u_h), leaf(g.b_h)};
  b.policy_head = bind_dense(t, p.policy_head, trainable);
  b.value_head = bind_dense(t, p.value_head, trainable);
  b.tiou_head = bind_dense(t, p.tiou_head, trainable);
  b.loc_head = bind_dense(t, p.loc_head, trainable);
  return b;
}

}  // namespace

BoundParams bind(Tape& tape, ModelParams& params) {
  return bind_impl(tape, params, true);
}

BoundParams bind_frozen(Tape& tape, const ModelParams& params) {
  return bind_impl(tape, params, false);
}

// ---------------------------------------------------------------------------
// Forward

Var gru_step(Tape& t, const BoundGru& g, Var x, Var h_prev) {
  Var z = ad::activate(
      t, ad::add(t, ad::affine(t, x, g.w_z, g.b_z, Activation::kNone),
                 ad::matvec(t, g.u_z, h_prev)),
      Activation::kSigmoid);
  Var r = ad::activate(
      t, ad::add(t, ad::affine(t, x, g.w_r, g.b_r, Activation::kNone),
                 ad::matvec(t, g.u_r, h_prev)),
      Activation::kSigmoid);
  Var cand = ad::activate(
      t, ad::add(t, ad::affine(t, x, g.w_h, g.b_h, Activation::kNone),
                 ad::matvec(t, g.u_h, ad::mul(t, r, h_prev))),
      Activation::kTanh);
  return ad::add(t, ad::mul(t, ad::one_minus(t, z), h_prev),
                 ad::mul(t, z, cand));
}

ContextEncoding encode_context(Tape& t, const BoundParams& p,
                               std::span<const double> query,
                               std::span<const double> global_feature) {
  if (query.size() != t.cols(p.query_enc.weight))
    throw ConfigError("observe: query dim " + std::to_string(query.size()) +
                      " != " + std::to_string(t.cols(p.query_enc.weight)));
  if (global_feature.size() != t.cols(p.global_enc.weight))
    throw ConfigError("observe: video dim " +
                      std::to_string(global_feature.size()) + " != " +
                      std::to_string(t.cols(p.global_enc.weight)));
  ContextEncoding ctx;
  ctx.query = ad::affine(t, t.constant(query), p.query_enc.weight,
                         p.query_enc.bias, Activation::kRelu);
  ctx.global = ad::affine(t, t.constant(global_feature), p.global_enc.weight,
                          p.global_enc.bias, Activation::kRelu);
  return ctx;
}

Var observe(Tape& t, const BoundParams& p, const ContextEncoding& ctx,
            std::span<const double> local, Interval location) {
  if (local.size() != t.cols(p.local_enc.weight))
    throw ConfigError("observe: local feature dim " +
                      std::to_string(local.size()) + " != " +
                      std::to_string(t.cols(p.local_enc.weight)));
  Var enc_local = ad::affine(t, t.constant(local), p.local_enc.weight,
                             p.local_enc.bias, Activation::kRelu);
  Var fused_in;
  if (p.use_location) {
    Var loc = t.constant({location.start, location.end}, 2);
    Var enc_loc = ad::affine(t, loc, p.loc_enc.weight, p.loc_enc.bias,
                             Activation::kRelu);
    fused_in = ad::concat(t, {ctx.query, ctx.global, enc_local, enc_loc});
  } else {
    fused_in = ad::concat(t, {ctx.query, ctx.global, enc_local});
  }
  return ad::affine(t, fused_in, p.fusion.weight, p.fusion.bias,
                    Activation::kRelu);
}

Var observe(Tape& t, const BoundParams& p, std::span<const double> query,
            std::span<const double> global_feature,
            std::span<const double> local, Interval location) {
  return observe(t, p, encode_context(t, p, query, global_feature), local,
                 location);
}

StepVars actor_critic_step(Tape& t, const BoundParams& p, Var state,
                           Var h_prev) {
  StepVars v;
  v.hidden = gru_step(t, p.gru, state, h_prev);
  v.policy = ad::softmax(t, ad::affine(t, v.hidden, p.policy_head.weight,
                                       p.policy_head.bias, Activation::kNone));
  v.value = ad::affine(t, v.hidden, p.value_head.weight, p.value_head.bias,
                       Activation::kNone);
  v.p_tiou = ad::affine(t, v.hidden, p.tiou_head.weight, p.tiou_head.bias,
                        Activation::kSigmoid);
  v.p_loc = ad::affine(t, v.hidden, p.loc_head.weight, p.loc_head.bias,
                       Activation::kNone);
  return v;
}

AgentOutput read_output(const Tape& t, const StepVars& v) {
  AgentOutput o;
  auto pol = t.value(v.policy);
  std::copy(pol.begin(), pol.end(), o.policy.begin());
  o.value = t.scalar(v.value);
  o.p_tiou = t.scalar(v.p_tiou);
  auto loc = t.value(v.p_loc);
  o.p_loc = {loc[0], loc[1]};
  auto h = t.value(v.hidden);
  o.hidden.assign(h.begin(), h.end());
  return o;
}

int select_action(std::span<const double> policy, SelectMode mode, Rng& rng) {
  if (policy.empty()) throw ContractError("select_action: empty policy");
  double total = 0.0;
  for (double p : policy) {
    if (!(p >= 0.0)) throw ContractError("select_action: invalid probability");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-6)
    throw ContractError("select_action: policy sums to " +
                        std::to_string(total));
  if (mode == SelectMode::kGreedy) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < policy.size(); ++i)
      if (policy[i] > policy[best]) best = i;
    return static_cast<int>(best);
  }
  std::uniform_real_distribution<double> u(0.0, total);
  const double draw = u(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    if (policy[i] <= 0.0) continue;
    last_positive = i;
    acc += policy[i];
    if (draw < acc) return static_cast<int>(i);
  }
  return static_cast<int>(last_positive);
}

// ---------------------------------------------------------------------------
// Checkpoints

void save_checkpoint(const ModelParams& params, const AgentConfig& cfg,
                     const std::string& path) {
  json tensors = json::object();
  for (const auto& [name, t] : params.named())
    tensors[name] = {{"shape", t->shape}, {"data", t->data}};
  json doc = {{"config", agent_config_to_json(cfg)},
              {"params", std::move(tensors)}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  out << doc.dump() << '\n';
  if (!out) throw Error("write failed for '" + path + "'");
}

std::pair<ModelParams, AgentConfig> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what(), 0);
  }
  if (!doc.contains("config") || !doc.contains("params"))
    throw SchemaError("checkpoint '" + path +
                      "': expected 'config' and 'params' members");
  AgentConfig cfg = agent_config_from_json(doc.at("config"));
  ModelParams params = zero_params(cfg);
  const json& stored = doc.at("params");
  for (auto& r : params.refs()) {
    if (!stored.contains(r.name))
      throw SchemaError("checkpoint: missing tensor group '" + r.name + "'");
    const json& g = stored.at(r.name);
    try {
      auto shape = g.at("shape").get<std::vector<std::size_t>>();
      auto data = g.at("data").get<std::vector<double>>();
      if (shape != r.tensor->shape)
        throw SchemaError("checkpoint: tensor group '" + r.name +
                          "' has shape inconsistent with the stored config");
      if (data.size() != r.tensor->size())
        throw SchemaError("checkpoint: tensor group '" + r.name +
                          "' has wrong data length");
      r.tensor->data = std::move(data);
    } catch (const json::exception& e) {
      throw SchemaError("checkpoint: tensor group '" + r.name +
                        "': " + e.what());
    }
  }
  return {std::move(params), cfg};
}

std::pair<ModelParams, AgentConfig> load_checkpoint(
    const std::string& path, const AgentConfig& expected) {
  auto loaded = load_checkpoint(path);
  if (!(loaded.second == expected))
    throw SchemaError("checkpoint '" + path +
                      "': stored agent config does not match the requested one");
  return loaded;
}

}  // namespace tgrl
