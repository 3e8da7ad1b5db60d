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

#ifndef TGRL_AGENT_H_
#define TGRL_AGENT_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tgrl/adam.h"
#include "tgrl/features.h"
#include "tgrl/interval.h"
#include "tgrl/tape.h"
#include "tgrl/tensor.h"

namespace tgrl {

// Layer sizes of the observation network and the recurrent actor-critic.
struct AgentConfig {
  std::size_t query_dim = 64;      // d_q
  std::size_t video_dim = 32;      // d_v
  std::size_t query_enc = 128;     // d_qe
  std::size_t video_enc = 64;      // d_ve, global and local encoders
  std::size_t location_enc = 16;   // d_le
  std::size_t state_dim = 128;     // d_s
  std::size_t hidden_dim = 128;    // d_h
  bool use_location = true;        // explicit [l_s, l_e] input

  static AgentConfig desk(std::size_t query_dim, std::size_t video_dim);
  // 1024/512/128/1024/1024 layer sizes over 2400-d queries and 4096-d video
  // features by default.
  static AgentConfig paper(std::size_t query_dim = 2400,
                           std::size_t video_dim = 4096);

  void validate() const;
  bool operator==(const AgentConfig&) const = default;
};

struct DenseParams {
  Tensor weight;  // out x in
  Tensor bias;    // out
};

// z = sig(W_z x + U_z h + b_z), r = sig(W_r x + U_r h + b_r),
// c = tanh(W_h x + U_h (r * h) + b_h), h' = (1 - z) * h + z * c.
struct GruParams {
  Tensor w_z, u_z, b_z;
  Tensor w_r, u_r, b_r;
  Tensor w_h, u_h, b_h;
};

enum class ParamSet { kActor, kCritic, kSupervised };

struct ModelParams {
  DenseParams query_enc;
  DenseParams global_enc;
  DenseParams local_enc;
  DenseParams loc_enc;  // unused (and absent from refs) without location
  DenseParams fusion;
  GruParams gru;
  DenseParams policy_head;  // 7 logits
  DenseParams value_head;   // scalar
  DenseParams tiou_head;    // scalar, through a sigmoid
  DenseParams loc_head;     // (P_s, P_e)
  bool use_location = true;

  // Every named tensor in a fixed order, e.g. "gru.w_z", "policy_head.bias".
  std::vector<ParamRef> refs();
  std::vector<std::pair<std::string, const Tensor*>> named() const;
};

// Which optimization set a tensor belongs to: observation network, GRU and
// policy head are the actor set, the value head the critic set, the tIoU and
// location heads the supervised set.
ParamSet param_set(std::string_view name);

// (name, shape) for every tensor of a configuration, in refs() order.
std::vector<std::pair<std::string, std::vector<std::size_t>>> param_layout(
    const AgentConfig& cfg);

ModelParams zero_params(const AgentConfig& cfg);
// Glorot-uniform weights, zero biases.
ModelParams init_params(const AgentConfig& cfg, Rng& rng);

// Sum of all parameter values weighted by position; cheap change detector.
double checksum(const ModelParams& params);

// Tape handles for one parameter set.
struct BoundDense {
  ad::Var weight, bias;
};
struct BoundGru {
  ad::Var w_z, u_z, b_z, w_r, u_r, b_r, w_h, u_h, b_h;
};
struct BoundParams {
  BoundDense query_enc, global_enc, local_enc, loc_enc, fusion;
  BoundGru gru;
  BoundDense policy_head, value_head, tiou_head, loc_head;
  bool use_location = true;
};

BoundParams bind(ad::Tape& tape, ModelParams& params);
BoundParams bind_frozen(ad::Tape& tape, const ModelParams& params);

ad::Var gru_step(ad::Tape& tape, const BoundGru& gru, ad::Var x, ad::Var h_prev);

// Query and global-video encodings, fixed for the whole episode.
struct ContextEncoding {
  ad::Var query;
  ad::Var global;
};
ContextEncoding encode_context(ad::Tape& tape, const BoundParams& p,
                               std::span<const double> query,
                               std::span<const double> global_feature);

// State vector from the cached context plus the current clip feature and
// boundaries. Each input has its own affine+relu encoder; the encodings are
// concatenated and fused by one more affine+relu layer.
ad::Var observe(ad::Tape& tape, const BoundParams& p,
                const ContextEncoding& ctx, std::span<const double> local,
                Interval location);
ad::Var observe(ad::Tape& tape, const BoundParams& p,
                std::span<const double> query,
                std::span<const double> global_feature,
                std::span<const double> local, Interval location);

struct StepVars {
  ad::Var hidden;
  ad::Var policy;
  ad::Var value;
  ad::Var p_tiou;
  ad::Var p_loc;
};

// GRU update followed by the four heads, all reading the new hidden state.
StepVars actor_critic_step(ad::Tape& tape, const BoundParams& p, ad::Var state,
                           ad::Var h_prev);

struct AgentOutput {
  std::array<double, 7> policy{};
  double value = 0.0;
  double p_tiou = 0.0;
  std::array<double, 2> p_loc{};
  std::vector<double> hidden;
};
AgentOutput read_output(const ad::Tape& tape, const StepVars& v);

enum class SelectMode { kSample, kGreedy };

// Greedy: argmax with the lowest index winning ties. Sample: categorical draw.
// Throws ContractError if the entries do not sum to 1 within 1e-6.
int select_action(std::span<const double> policy, SelectMode mode, Rng& rng);

// Checkpoint: {"config": {...}, "params": {name: {"shape": [...],
// "data": [...]}}}. Values round-trip bit-exactly.
void save_checkpoint(const ModelParams& params, const AgentConfig& cfg,
                     const std::string& path);
std::pair<ModelParams, AgentConfig> load_checkpoint(const std::string& path);
// Additionally requires the stored config to equal `expected`.
std::pair<ModelParams, AgentConfig> load_checkpoint(
    const std::string& path, const AgentConfig& expected);

}  // namespace tgrl

#endif  // TGRL_AGENT_H_
