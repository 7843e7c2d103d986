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

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "core/agent_env.hpp"
#include "core/grpo.hpp"
#include "core/policy.hpp"
#include "core/rewards.hpp"
#include "core/synthetic.hpp"

namespace boundrl::train {

struct TrajectoryReward {
  rewards::RewardBreakdown breakdown;
  schema::StrictVerdict verdict;
  std::optional<schema::AnswerValue> prediction;
  int tool_calls = 0;
};

// Scores a finished rollout. Parse failures are scored, never thrown; only
// an invalid truth throws Error{Schema}.
TrajectoryReward score_trajectory_reward(const schema::Schema& schema, const env::Trajectory& traj,
                                         const Json& truth, double progress, const rewards::RewardConfig& cfg);

struct TrainConfig {
  std::uint64_t seed = 1;
  int steps = 200;
  int prompts_per_step = 16;  // times group_size rollouts per step
  double lr = 1e-2;

  int sft_steps = 1000;  // format warm start on teacher trajectories, gene zeroed
  int sft_batch = 16;
  double sft_lr = 2.0;

  int hidden = 16;
  int window = 4;
  double init_scale = 0.1;

  int eval_every = 0;  // 0: evaluate once at the end

  grpo::AdvantageConfig advantage;
  grpo::GeneGroundingConfig gene;
  rewards::RewardConfig reward;
  env::RolloutConfig rollout;
  synth::SyntheticConfig task;

  void validate(const schema::Schema& schema) const;
  Json to_json() const;
  // Missing keys keep defaults; unknown keys throw Error{InvalidArgument}.
  static TrainConfig from_json(const Json& doc);
};

struct StepReport {
  int step = 0;
  double progress = 0.0;
  double reward_mean = 0.0;
  double r_json_mean = 0.0;
  double r_corr_mean = 0.0;
  double r_tool_mean = 0.0;
  double accuracy = 0.0;
  double tool_calls_mean = 0.0;
  double gene_delta_mean = 0.0;  // clipped, over answer tokens of correct rollouts
  std::size_t gene_delta_tokens = 0;
  double loss = 0.0;
  double clip_fraction = 0.0;
  double kl = 0.0;
  std::optional<Json> eval;

  Json to_json() const;
};

struct EvalReport {
  double accuracy = 0.0;
  double accuracy_gene_ablated = 0.0;
  double json_valid_rate = 0.0;
  double mean_tool_calls = 0.0;
  double mean_clipped_delta = 0.0;  // answer tokens of correct greedy rollouts
  std::size_t delta_tokens = 0;
  std::size_t n = 0;

  Json to_json() const;
};

struct TrainReport {
  std::vector<StepReport> steps;
  double sft_final_loss = 0.0;
  EvalReport final_eval;
  policy::PolicyParams params;

  // Token-weighted mean clipped delta over the last ceil(fraction * steps) steps.
  double final_window_delta(double fraction = 0.2) const;
  Json summary_json() const;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index must write
// only its own output slot.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

EvalReport evaluate_policy(const policy::PolicyParams& params, const env::Environment& environment,
                           const std::vector<env::Prompt>& prompts, const TrainConfig& cfg, int jobs);

// Format warm start, then GRPO on the synthetic gene-dependent task.
// Throws Error{Divergence} on a non-finite loss or parameters.
TrainReport train_toy(const TrainConfig& cfg, const std::function<void(const StepReport&)>& on_step = {},
                      int jobs = 1);

}  // namespace boundrl::train
