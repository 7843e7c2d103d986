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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/agent_env.hpp"
#include "core/schema.hpp"

namespace boundrl::distill {

struct TrajectoryScore {
  double correctness = -1.0;
  bool strict_json = false;
  bool parse_ok = false;
  double evidence_quality = 0.0;
  int tool_errors = 0;
  int non_error_tool_calls = 0;
  int answer_length = 0;  // bytes of the final answer text
  bool used_rag = false;  // at least one non-errored call
  bool used_gem = false;

  Json to_json() const;
};

// Evidence quality is the fraction of tool calls whose observation is
// non-errored, non-empty and relevant to the field: a rag observation is
// relevant when it carries the field, a gem observation when the field is
// an interval, optimum or substrate field.
TrajectoryScore score_trajectory(const schema::Schema& schema, const env::Trajectory& traj, const Json& truth);

struct RankDecision {
  std::size_t winner = 0;
  std::string decided_by;  // name of the comparison level that separated the top two
};

// Lexicographic: correctness, then (interval/optimum only) rag+gem usage,
// strict_json, parse_ok, evidence_quality, fewer tool errors, more clean
// calls, shorter answer, lowest index. Throws InvalidArgument when empty.
RankDecision rank_candidates(std::span<const TrajectoryScore> scores, const schema::TraitField& field);

struct RetryPlan {
  bool retry = false;
  std::optional<std::string> forced_protocol;
  int min_gem_calls = 0;

  Json to_json() const;
};

RetryPlan retry_decision(const schema::TraitField& field, const TrajectoryScore& best);

// Replaces the final answer span; everything before it stays byte-identical
// and the result is flagged as repaired. Throws Error{Schema} when the
// corrected text does not pass the strict parse.
env::Trajectory merge_repair(const schema::Schema& schema, const env::Trajectory& traj,
                             const std::string& corrected_answer);

// Runs scoring, ranking, retry planning and the optional repair for one
// candidate bundle: either a list of trajectory dumps carrying "truth", or
// {"field", "truth", "candidates": [...], "corrected_answer"?}.
Json distill_bundle(const schema::Schema& schema, const Json& bundle);

}  // namespace boundrl::distill
