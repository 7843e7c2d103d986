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

#include <map>
#include <optional>
#include <string>

#include "core/schema.hpp"

namespace boundrl::rewards {

struct RewardWeights {
  double json = 0.5;
  double corr = 1.0;
  double tool = 1.0;
  double nt = 1.0;
  double external = 0.0;   // additive R_external hook
  double attention = 0.0;  // reserved slot; must stay 0
};

struct ToolSchedule {
  double t_init = 4.0;
  double t_final = 2.0;

  // Linear anneal of the tool-call target over training progress in [0, 1].
  double target(double progress) const { return t_init + progress * (t_final - t_init); }
};

struct CorrectnessConfig {
  double compactness = 0.25;  // lambda_c in the interval reward
  // Per-field scale s_f. Interval scales penalize excess width; optimum
  // scales normalize midpoint error.
  std::map<std::string, double, std::less<>> interval_scale = {
      {"growth_temperature_range_C", 40.0}, {"pH_range", 7.0}, {"salinity_range", 15.0}};
  std::map<std::string, double, std::less<>> optimum_scale = {
      {"growth_temperature_opt_C", 10.0}, {"pH_opt", 2.0}, {"salinity_opt_wv_percent", 5.0}};
};

struct RewardConfig {
  RewardWeights weights;
  ToolSchedule schedule;
  CorrectnessConfig correctness;

  // Throws Error{InvalidArgument} on non-finite weights, non-positive
  // schedule targets or scales, or a nonzero attention weight.
  void validate() const;
  Json to_json() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static RewardConfig from_json(const Json& doc);
};

struct RewardInputs {
  double r_json = 0.0;
  double r_corr = 0.0;
  double r_tool = 0.0;
  double r_nt = 0.0;
};

struct RewardBreakdown {
  double r_json = 0.0;
  double r_corr = 0.0;
  double r_tool = 0.0;
  double r_nt = 0.0;
  double external = 0.0;
  double composite = 0.0;
  RewardWeights weights;

  Json to_json() const;
};

double json_format_reward(const schema::StrictVerdict& verdict);

double correctness_reward(const schema::Schema& schema, const schema::TraitField& field,
                          const std::optional<schema::AnswerValue>& prediction,
                          const schema::AnswerValue& truth, const CorrectnessConfig& cfg = {});

// Unranked micro-F1 between the first min(5, n) predicted labels and the
// truth set, both canonicalized.
double micro_f1_at_5(const schema::Schema& schema, const schema::TraitField& field,
                     const schema::RankedLabels& prediction, const schema::RankedLabels& truth);

double tool_use_reward(int calls, double progress, const ToolSchedule& schedule = {});

double no_tool_penalty(int calls, double r_corr);

RewardBreakdown composite_reward(const RewardInputs& parts, const RewardWeights& weights = {});

}  // namespace boundrl::rewards
