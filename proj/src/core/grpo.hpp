// Copyright 2026 The boundrl Authors
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

#pragma once

#include <span>
#include <vector>

#include "core/agent_env.hpp"
#include "core/policy.hpp"

namespace boundrl::grpo {

enum class ToolTokenMode { RawShaping, GroupNormalized };

struct AdvantageConfig {
  int group_size = 4;
  double eps_norm = 1e-4;
  double clip_eps = 0.2;
  double kl_beta = 0.0;
  double w_tool_token = 1.0;
  double w_gene = 0.5;
  double w_attn = 0.0;  // reserved; must stay 0
  ToolTokenMode tool_token_mode = ToolTokenMode::RawShaping;

  void validate() const;
};

struct GeneGroundingConfig {
  double cap = 5.0;
  bool positive_gate = true;

  void validate() const;
};

struct GroupStats {
  double mean = 0.0;
  double std = 0.0;  // population
};

// (R_j - mean_G) / (std_G + eps) over consecutive groups of size G.
std::vector<double> group_advantages(std::span<const double> rewards, int group_size, double eps,
                                     std::vector<GroupStats>* stats = nullptr);

// max(r_corr, 0) * clip(delta_t, -cap, cap) on answer positions, 0 elsewhere.
// With positive_gate off the gate factor is r_corr itself.
std::vector<double> gene_values_from_deltas(std::span<const double> deltas, std::span<const std::uint8_t> answer,
                                            double r_corr, const GeneGroundingConfig& cfg);

struct GeneGrounding {
  std::vector<double> values;  // per token
  std::vector<double> deltas;  // raw log-prob gaps on answer positions
};

// Runs exactly two teacher-forced passes over the trajectory's token
// stream, one with its gene and one with the zero vector.
GeneGrounding gene_grounding_rewards(const policy::PolicyParams& params, const env::Trajectory& traj,
                                     const env::PolicyMask& masks, double r_corr, const GeneGroundingConfig& cfg);

struct TokenAdvantages {
  std::vector<double> total;
  std::vector<double> sequence;
  std::vector<double> tool;
  std::vector<double> gene;
};

// `tool_value` is r_tool in RawShaping mode and the group-normalized tool
// reward in GroupNormalized mode; it is scaled by w_tool_token either way.
TokenAdvantages assemble_token_advantages(const env::PolicyMask& masks, double seq_adv, double tool_value,
                                          std::span<const double> gene_values, const AdvantageConfig& cfg);

struct SequenceBatchItem {
  std::span<const int> tokens;
  std::span<const double> gene;
  std::span<const double> old_logprobs;
  std::span<const double> advantages;
  std::span<const std::uint8_t> policy_mask;
};

struct LossResult {
  double loss = 0.0;
  double kl = 0.0;  // mean per-token KL, 0 when beta = 0
  std::size_t valid_tokens = 0;
  std::size_t clipped_tokens = 0;
  policy::Gradient grad;
};

// Clipped surrogate averaged over each sequence's valid tokens, then over
// sequences. `ref` is consulted only when cfg.kl_beta > 0.
LossResult grpo_loss_and_grad(const policy::PolicyParams& params, std::span<const SequenceBatchItem> batch,
                              const AdvantageConfig& cfg, const policy::PolicyParams* ref = nullptr);

// Per-token surrogate -min(rho A, clip(rho) A) and its derivative with
// respect to the token's log-probability.
struct SurrogateTerm {
  double loss = 0.0;
  double dloss_dlogp = 0.0;
  bool clipped = false;
};
SurrogateTerm clipped_surrogate(double logp, double old_logp, double advantage, double clip_eps);

std::uint64_t kl_evaluation_count();

}  // namespace boundrl::grpo
