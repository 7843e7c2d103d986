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
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/embedstore.hpp"
#include "core/gem.hpp"
#include "core/policy.hpp"
#include "core/rng.hpp"
#include "core/schema.hpp"
#include "core/tokenizer.hpp"

namespace boundrl::env {

enum class Role { System, User, Assistant, Tool };
enum class Origin { ModelGenerated, EnvironmentInserted };

const char* to_string(Role role);
const char* to_string(Origin origin);

struct Turn {
  Role role = Role::System;
  Origin origin = Origin::EnvironmentInserted;
  std::string text;
  std::vector<int> token_ids;
  std::vector<double> logprobs;  // sampling-time log-probs; Assistant turns only
  // Index of the first token of a trailing tool_call block, if any.
  std::optional<std::size_t> tool_block_start;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct ToolCallRecord {
  int round = 0;
  std::string tool;  // empty for malformed calls
  Json arguments;
  Json observation;
  bool errored = false;

  friend bool operator==(const ToolCallRecord&, const ToolCallRecord&) = default;
};

struct Trajectory {
  std::string strain_id;
  std::string field;
  std::string handle;
  std::vector<double> gene;
  std::vector<Turn> turns;
  std::vector<ToolCallRecord> tool_calls;
  std::optional<std::string> final_answer_text;
  bool repaired = false;
  std::optional<Json> truth;  // carried through dumps, unused by the loop

  std::vector<int> token_stream() const;
  std::vector<double> old_logprobs() const;  // 0 at environment positions
  std::size_t num_tokens() const;
  const Turn* final_assistant_turn() const;

  Json to_json() const;  // dump including masks
  static Trajectory from_json(const Json& doc);

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct RolloutConfig {
  int max_tool_rounds = 5;
  int max_new_tokens = 24;
  policy::SamplingConfig sampling;

  void validate() const;
};

struct PolicyMask {
  std::vector<std::uint8_t> policy;     // model-generated tokens
  std::vector<std::uint8_t> answer;     // final answer span
  std::vector<std::uint8_t> tool_call;  // model-written tool_call blocks
  std::size_t size() const { return policy.size(); }
};

PolicyMask build_policy_mask(const Trajectory& traj);

enum class CallStatus { NoCall, Call, Malformed };

struct ToolRequest {
  std::string tool;
  Json arguments = Json::object();
};

struct Detection {
  CallStatus status = CallStatus::NoCall;
  std::optional<ToolRequest> request;
  std::size_t block_start = 0;  // byte offset of the trailing block
};

// Looks only at the text's trailing segment: a final
// <tool_call>{"name": ..., "arguments": {...}}</tool_call> block.
Detection detect_tool_call(std::string_view assistant_text);

// Last assistant text without a trailing tool_call block; absent when that
// is empty or the rollout ended on a malformed call.
std::optional<std::string> extract_final_answer(const Trajectory& traj);

struct Prompt {
  std::string strain_id;
  std::string field;
  std::string handle;
  std::vector<double> gene;
  std::optional<Json> truth;
};

// JSONL of {"strain_id", "field", "gene": vector or store handle, "truth"}.
std::vector<Prompt> load_prompts(const std::string& text, const schema::Schema& schema, const embed::Store* store);

// Produces the model side of a rollout one token at a time.
class TokenSource {
 public:
  virtual ~TokenSource() = default;
  virtual void begin_segment(int /*segment_index*/) {}
  // Returns the next token; `logprob` receives its sampling-time log-prob.
  virtual int next(std::span<const int> context, std::span<const double> gene, Rng& rng, double& logprob) = 0;
};

class PolicySource : public TokenSource {
 public:
  PolicySource(const policy::PolicyParams& params, policy::SamplingConfig cfg) : params_(params), cfg_(cfg) {}
  int next(std::span<const int> context, std::span<const double> gene, Rng& rng, double& logprob) override;

 private:
  const policy::PolicyParams& params_;
  policy::SamplingConfig cfg_;
};

// Emits a fixed token list per segment (repeating the last list once the
// script runs out); logprobs are 0.
class ScriptedSource : public TokenSource {
 public:
  explicit ScriptedSource(std::vector<std::vector<int>> segments) : segments_(std::move(segments)) {}
  void begin_segment(int segment_index) override;
  int next(std::span<const int> context, std::span<const double> gene, Rng& rng, double& logprob) override;

 private:
  std::vector<std::vector<int>> segments_;
  std::size_t current_ = 0;
  std::size_t pos_ = 0;
};

struct ToolResult {
  Json observation;
  bool errored = false;
};

// Tool services and prompt rendering for one target field. Read-only after
// construction apart from an internal, locked observation token cache.
class Environment {
 public:
  Environment(const schema::Schema& schema, const tok::Tokenizer& tokenizer, const embed::Store* store,
              const gem::ModelSet* models);

  const tok::Tokenizer& tokenizer() const { return tokenizer_; }
  const schema::Schema& schema() const { return schema_; }

  ToolResult execute(const ToolRequest& request, const Prompt& prompt) const;
  static ToolResult malformed_call();

  std::vector<Turn> prompt_turns(const Prompt& prompt) const;

  // Same seed, source state and inputs give identical trajectories.
  Trajectory run_rollout(TokenSource& source, const Prompt& prompt, const RolloutConfig& cfg,
                         std::uint64_t seed) const;

  std::vector<int> encode_cached(const std::string& text) const;

 private:
  const schema::Schema& schema_;
  const tok::Tokenizer& tokenizer_;
  const embed::Store* store_;
  const gem::ModelSet* models_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::vector<int>> cache_;
};

}  // namespace boundrl::env
