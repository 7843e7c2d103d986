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

#include "core/grpo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace boundrl::grpo {

namespace {
std::atomic<std::uint64_t> g_kl_evaluations{0};
}

void AdvantageConfig::validate() const {
  if (group_size < 2) throw Error(ErrorKind::InvalidArgument, "group_size must be at least 2");
  if (!(eps_norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps_norm must be positive");
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw Error(ErrorKind::InvalidArgument, "clip_eps must be in (0, 1)");
  if (!(kl_beta >= 0.0) || !std::isfinite(kl_beta)) throw Error(ErrorKind::InvalidArgument, "kl_beta must be >= 0");
  if (!std::isfinite(w_tool_token) || !std::isfinite(w_gene)) {
    throw Error(ErrorKind::InvalidArgument, "advantage weights must be finite");
  }
  if (w_attn != 0.0) throw Error(ErrorKind::InvalidArgument, "w_attn must be 0");
}

void GeneGroundingConfig::validate() const {
  if (!(cap > 0.0) || !std::isfinite(cap)) throw Error(ErrorKind::InvalidArgument, "gene cap must be positive");
}

std::vector<double> group_advantages(std::span<const double> rewards, int group_size, double eps,
                                     std::vector<GroupStats>* stats) {
  if (group_size < 1 || rewards.size() % static_cast<std::size_t>(group_size) != 0) {
    throw Error(ErrorKind::InvalidArgument, "reward count " + std::to_string(rewards.size()) +
                                                " is not divisible by group size " + std::to_string(group_size));
  }
  const auto G = static_cast<std::size_t>(group_size);
  std::vector<double> out(rewards.size());
  if (stats) stats->clear();
  for (std::size_t start = 0; start < rewards.size(); start += G) {
    const auto group = rewards.subspan(start, G);
    double mean = 0.0;
    for (double r : group) mean += r;
    mean /= static_cast<double>(G);
    double var = 0.0;
    for (double r : group) var += (r - mean) * (r - mean);
    const double sd = std::sqrt(var / static_cast<double>(G));
    for (std::size_t j = 0; j < G; ++j) out[start + j] = (group[j] - mean) / (sd + eps);
    if (stats) stats->push_back({mean, sd});
  }
  return out;
}

std::vector<double> gene_values_from_deltas(std::span<const double> deltas, std::span<const std::uint8_t> answer,
                                            double r_corr, const GeneGroundingConfig& cfg) {
  if (deltas.size() != answer.size()) throw Error(ErrorKind::MaskMisalignment, "delta and answer mask lengths differ");
  std::vector<double> out(deltas.size(), 0.0);
  const double gate = cfg.positive_gate ? std::max(r_corr, 0.0) : r_corr;
  if (gate == 0.0) return out;
  for (std::size_t t = 0; t < deltas.size(); ++t) {
    if (answer[t]) out[t] = gate * std::clamp(deltas[t], -cfg.cap, cfg.cap);
  }
  return out;
}

GeneGrounding gene_grounding_rewards(const policy::PolicyParams& params, const env::Trajectory& traj,
                                     const env::PolicyMask& masks, double r_corr, const GeneGroundingConfig& cfg) {
  const auto tokens = traj.token_stream();
  if (masks.answer.size() != tokens.size()) {
    throw Error(ErrorKind::MaskMisalignment, "answer mask length differs from the token stream");
  }
  const std::vector<double> zero(traj.gene.size(), 0.0);
  const auto with_gene = policy::teacher_forced_logprobs(params, tokens, traj.gene, masks.answer);
  const auto without = policy::teacher_forced_logprobs(params, tokens, zero, masks.answer);
  GeneGrounding out;
  out.deltas.assign(tokens.size(), 0.0);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (masks.answer[t]) out.deltas[t] = with_gene[t] - without[t];
  }
  out.values = gene_values_from_deltas(out.deltas, masks.answer, r_corr, cfg);
  return out;
}

TokenAdvantages assemble_token_advantages(const env::PolicyMask& masks, double seq_adv, double tool_value,
                                          std::span<const double> gene_values, const AdvantageConfig& cfg) {
  const std::size_t n = masks.size();
  if (masks.answer.size() != n || masks.tool_call.size() != n || gene_values.size() != n) {
    throw Error(ErrorKind::MaskMisalignment, "advantage inputs are not aligned to the token stream");
  }
  TokenAdvantages a;
  a.total.assign(n, 0.0);
  a.sequence.assign(n, 0.0);
  a.tool.assign(n, 0.0);
  a.gene.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (!masks.policy[t]) continue;
    if (masks.answer[t]) {
      a.sequence[t] = seq_adv;
      a.gene[t] = cfg.w_gene * gene_values[t];
    }
    if (masks.tool_call[t]) a.tool[t] = cfg.w_tool_token * tool_value;
    a.total[t] = a.sequence[t] + a.tool[t] + a.gene[t];
  }
  return a;
}

SurrogateTerm clipped_surrogate(double logp, double old_logp, double advantage, double clip_eps) {
  const double rho = std::exp(logp - old_logp);
  const double clipped_rho = std::clamp(rho, 1.0 - clip_eps, 1.0 + clip_eps);
  const double unclipped = rho * advantage;
  const double clipped = clipped_rho * advantage;
  SurrogateTerm term;
  if (clipped < unclipped) {
    term.loss = -clipped;
    term.clipped = true;
    term.dloss_dlogp = 0.0;
  } else {
    term.loss = -unclipped;
    term.dloss_dlogp = -unclipped;  // d(rho)/d(logp) = rho
  }
  return term;
}

LossResult grpo_loss_and_grad(const policy::PolicyParams& params, std::span<const SequenceBatchItem> batch,
                              const AdvantageConfig& cfg, const policy::PolicyParams* ref) {
  LossResult out;
  out.grad = params.zeros_like();
  if (batch.empty()) return out;
  const bool use_kl = cfg.kl_beta > 0.0;
  if (use_kl && !ref) throw Error(ErrorKind::InvalidArgument, "kl_beta > 0 needs a reference policy");
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  double kl_sum = 0.0;
  for (const auto& item : batch) {
    const std::size_t n = item.tokens.size();
    if (item.old_logprobs.size() != n || item.advantages.size() != n || item.policy_mask.size() != n) {
      throw Error(ErrorKind::MaskMisalignment, "sequence inputs are not aligned to its tokens");
    }
    std::size_t valid = 0;
    for (auto m : item.policy_mask) valid += m ? 1 : 0;
    if (valid == 0) continue;
    const double w = inv_batch / static_cast<double>(valid);
    for (std::size_t t = 0; t < n; ++t) {
      if (!item.policy_mask[t]) continue;
      const auto context = item.tokens.first(t);
      const double adv = item.advantages[t];
      if (adv != 0.0) {
        const auto lp = policy::next_logprobs(params, context, item.gene)[static_cast<std::size_t>(item.tokens[t])];
        const auto term = clipped_surrogate(lp, item.old_logprobs[t], adv, cfg.clip_eps);
        out.loss += w * term.loss;
        if (term.clipped) ++out.clipped_tokens;
        if (term.dloss_dlogp != 0.0) {
          policy::accumulate_logprob_grad(params, context, item.gene, item.tokens[t], w * term.dloss_dlogp, out.grad);
        }
      }
      if (use_kl) {
        g_kl_evaluations.fetch_add(1, std::memory_order_relaxed);
        const double kl = policy::kl_divergence(params, *ref, context, item.gene, w * cfg.kl_beta, &out.grad);
        out.loss += w * cfg.kl_beta * kl;
        kl_sum += kl;
      }
    }
    out.valid_tokens += valid;
  }
  if (use_kl && out.valid_tokens > 0) out.kl = kl_sum / static_cast<double>(out.valid_tokens);
  return out;
}

std::uint64_t kl_evaluation_count() { return g_kl_evaluations.load(); }

}  // namespace boundrl::grpo
