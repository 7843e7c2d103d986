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

#include "core/distill.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/rewards.hpp"
#include "core/tokenizer.hpp"

namespace boundrl::distill {

namespace {

constexpr double kPerfect = 1.0 - 1e-9;

bool gem_relevant(const schema::TraitField& field) {
  return field.is_numeric() || field.family == schema::Family::MultiLabel;
}

bool rag_carries_field(const Json& obs, const std::string& field) {
  if (!obs.contains("top_similar_records") || !obs["top_similar_records"].is_array()) return false;
  for (const auto& rec : obs["top_similar_records"]) {
    if (rec.contains("phenotypes") && rec["phenotypes"].is_object() && rec["phenotypes"].contains(field)) return true;
  }
  return false;
}

bool non_empty(const Json& obs, const std::string& tool) {
  if (tool == "rag_tool") return obs.value("retrieved_count", 0) > 0;
  if (tool == "gem_tool") {
    return obs.contains("minimal_substrate_dict") && obs["minimal_substrate_dict"].is_object() &&
           !obs["minimal_substrate_dict"].empty();
  }
  return false;
}

bool interval_or_optimum(const schema::TraitField& field) { return field.is_numeric(); }

}  // namespace

Json TrajectoryScore::to_json() const {
  Json doc = Json::object();
  doc["correctness"] = correctness;
  doc["strict_json"] = strict_json;
  doc["parse_ok"] = parse_ok;
  doc["evidence_quality"] = evidence_quality;
  doc["tool_errors"] = tool_errors;
  doc["non_error_tool_calls"] = non_error_tool_calls;
  doc["answer_length"] = answer_length;
  doc["used_rag"] = used_rag;
  doc["used_gem"] = used_gem;
  return doc;
}

Json RetryPlan::to_json() const {
  Json doc = Json::object();
  doc["retry"] = retry;
  doc["forced_protocol"] = forced_protocol ? Json(*forced_protocol) : Json(nullptr);
  doc["min_gem_calls"] = min_gem_calls;
  return doc;
}

TrajectoryScore score_trajectory(const schema::Schema& schema, const env::Trajectory& traj, const Json& truth_json) {
  const auto& field = schema.field(traj.field);
  const auto truth = schema.value_from_json(field, truth_json);
  if (!truth.verdict.valid()) throw Error(ErrorKind::Schema, "invalid truth for field " + traj.field);

  TrajectoryScore s;
  std::optional<schema::AnswerValue> strict;
  if (traj.final_answer_text) {
    auto parsed = schema.parse_final_answer(*traj.final_answer_text, field);
    s.strict_json = parsed.verdict.valid();
    strict = std::move(parsed.value);
    s.parse_ok = s.strict_json || schema.best_effort_parse(*traj.final_answer_text, field).has_value();
    s.answer_length = static_cast<int>(traj.final_answer_text->size());
  }
  s.correctness = rewards::correctness_reward(schema, field, strict, *truth.value);

  int useful = 0;
  for (const auto& call : traj.tool_calls) {
    if (call.errored) {
      ++s.tool_errors;
      continue;
    }
    ++s.non_error_tool_calls;
    if (call.tool == "rag_tool") s.used_rag = true;
    if (call.tool == "gem_tool") s.used_gem = true;
    const bool relevant = call.tool == "rag_tool" ? rag_carries_field(call.observation, traj.field)
                                                  : call.tool == "gem_tool" && gem_relevant(field);
    if (relevant && non_empty(call.observation, call.tool)) ++useful;
  }
  if (!traj.tool_calls.empty()) {
    s.evidence_quality = static_cast<double>(useful) / static_cast<double>(traj.tool_calls.size());
  }
  return s;
}

RankDecision rank_candidates(std::span<const TrajectoryScore> scores, const schema::TraitField& field) {
  if (scores.empty()) throw Error(ErrorKind::InvalidArgument, "rank_candidates: no candidates");
  const bool prefer_both = interval_or_optimum(field);
  // Returns the first level at which a and b differ and whether a wins it.
  const auto compare = [&](std::size_t ia, std::size_t ib) -> std::pair<const char*, bool> {
    const auto& a = scores[ia];
    const auto& b = scores[ib];
    if (a.correctness != b.correctness) return {"correctness", a.correctness > b.correctness};
    if (prefer_both) {
      const bool ab = a.used_rag && a.used_gem;
      const bool bb = b.used_rag && b.used_gem;
      if (ab != bb) return {"both_tools", ab};
    }
    if (a.strict_json != b.strict_json) return {"strict_json", a.strict_json};
    if (a.parse_ok != b.parse_ok) return {"parse_ok", a.parse_ok};
    if (a.evidence_quality != b.evidence_quality) return {"evidence_quality", a.evidence_quality > b.evidence_quality};
    if (a.tool_errors != b.tool_errors) return {"tool_errors", a.tool_errors < b.tool_errors};
    if (a.non_error_tool_calls != b.non_error_tool_calls) {
      return {"non_error_tool_calls", a.non_error_tool_calls > b.non_error_tool_calls};
    }
    if (a.answer_length != b.answer_length) return {"answer_length", a.answer_length < b.answer_length};
    return {"index", ia < ib};
  };

  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (!compare(best, i).second) best = i;
  }
  RankDecision d;
  d.winner = best;
  if (scores.size() == 1) {
    d.decided_by = "single_candidate";
    return d;
  }
  // The runner-up is the best of the rest; the deciding level is where the
  // winner first beats it.
  std::size_t runner = best == 0 ? 1 : 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == best || i == runner) continue;
    if (!compare(runner, i).second) runner = i;
  }
  d.decided_by = compare(best, runner).first;
  return d;
}

RetryPlan retry_decision(const schema::TraitField& field, const TrajectoryScore& best) {
  const bool imperfect = best.correctness < kPerfect;
  RetryPlan plan;
  if (interval_or_optimum(field)) {
    plan.retry = imperfect;
  } else if (field.family == schema::Family::MultiLabel) {
    plan.retry = imperfect && !best.used_gem;
  } else {
    plan.retry = imperfect && best.used_rag && !best.used_gem;
  }
  if (plan.retry) {
    plan.min_gem_calls = interval_or_optimum(field) ? 2 : 1;
    plan.forced_protocol = "call rag_tool first, then at least " + std::to_string(plan.min_gem_calls) +
                           " gem_tool call" + (plan.min_gem_calls > 1 ? "s" : "");
  }
  return plan;
}

env::Trajectory merge_repair(const schema::Schema& schema, const env::Trajectory& traj,
                             const std::string& corrected_answer) {
  const auto& field = schema.field(traj.field);
  const auto parsed = schema.parse_final_answer(corrected_answer, field);
  if (!parsed.verdict.valid()) {
    throw Error(ErrorKind::Schema, std::string("corrected answer fails the strict parse: ") +
                                       schema::to_string(*parsed.verdict.failure));
  }
  env::Trajectory out = traj;
  out.repaired = true;
  const auto tokenizer = tok::Tokenizer::for_field(field);

  if (!out.final_assistant_turn()) {
    env::Turn turn;
    turn.role = env::Role::Assistant;
    turn.origin = env::Origin::ModelGenerated;
    turn.text = corrected_answer;
    turn.token_ids = tokenizer.encode_answer(corrected_answer);
    turn.logprobs.assign(turn.token_ids.size(), 0.0);
    out.turns.push_back(std::move(turn));
    out.final_answer_text = env::extract_final_answer(out);
    return out;
  }

  auto& turn = out.turns.back();
  const auto det = env::detect_tool_call(turn.text);
  const bool has_block = det.status != env::CallStatus::NoCall && turn.tool_block_start.has_value();
  const std::size_t byte_cut = has_block ? det.block_start : turn.text.size();
  const std::size_t token_cut = has_block ? *turn.tool_block_start : turn.token_ids.size();

  if (turn.text.substr(0, byte_cut) != corrected_answer) {
    std::vector<int> ids = tokenizer.encode(corrected_answer);
    if (!has_block) ids.push_back(tok::kEos);
    std::vector<double> lps(ids.size(), 0.0);
    const std::size_t new_block = ids.size();
    ids.insert(ids.end(), turn.token_ids.begin() + static_cast<std::ptrdiff_t>(token_cut), turn.token_ids.end());
    if (turn.logprobs.size() == turn.token_ids.size()) {
      lps.insert(lps.end(), turn.logprobs.begin() + static_cast<std::ptrdiff_t>(token_cut), turn.logprobs.end());
    } else {
      lps.resize(ids.size(), 0.0);
    }
    turn.text = corrected_answer + turn.text.substr(byte_cut);
    turn.token_ids = std::move(ids);
    turn.logprobs = std::move(lps);
    if (has_block) turn.tool_block_start = new_block;
  }
  out.final_answer_text = corrected_answer;
  return out;
}

Json distill_bundle(const schema::Schema& schema, const Json& bundle) {
  std::vector<env::Trajectory> candidates;
  std::optional<Json> truth;
  std::optional<std::string> corrected;
  std::string field_name;
  Json sample_id = nullptr;

  const Json* list = nullptr;
  if (bundle.is_array()) {
    list = &bundle;
  } else if (bundle.is_object() && bundle.contains("candidates") && bundle["candidates"].is_array()) {
    list = &bundle["candidates"];
    if (bundle.contains("truth")) truth = bundle["truth"];
    if (bundle.contains("field")) field_name = bundle["field"].get<std::string>();
    if (bundle.contains("sample_id")) sample_id = bundle["sample_id"];
    if (bundle.contains("corrected_answer") && !bundle["corrected_answer"].is_null()) {
      if (!bundle["corrected_answer"].is_string()) throw Error(ErrorKind::Schema, "bundle: corrected_answer must be a string");
      corrected = bundle["corrected_answer"].get<std::string>();
    }
  } else {
    throw Error(ErrorKind::Schema, "bundle: expected a list of trajectories or {\"candidates\": [...]}");
  }
  if (list->empty()) throw Error(ErrorKind::InvalidArgument, "bundle: no candidates");
  for (const auto& c : *list) candidates.push_back(env::Trajectory::from_json(c));
  if (field_name.empty()) field_name = candidates.front().field;
  for (const auto& c : candidates) {
    if (c.field != field_name) throw Error(ErrorKind::Schema, "bundle: candidates disagree on the field");
  }
  if (!truth) truth = candidates.front().truth;
  if (!truth) throw Error(ErrorKind::Schema, "bundle: no truth given");
  if (sample_id.is_null()) sample_id = candidates.front().strain_id;
  const auto& field = schema.field(field_name);

  std::vector<TrajectoryScore> scores;
  for (const auto& c : candidates) scores.push_back(score_trajectory(schema, c, *truth));
  const auto decision = rank_candidates(scores, field);
  const auto plan = retry_decision(field, scores[decision.winner]);

  Json log = Json::object();
  log["sample_id"] = sample_id;
  log["field"] = field_name;
  Json js = Json::array();
  for (const auto& s : scores) js.push_back(s.to_json());
  log["scores"] = std::move(js);
  log["winner"] = decision.winner;
  log["decided_by"] = decision.decided_by;
  log["retry"] = plan.to_json();
  log["evidence_quality_heuristic"] = "placeholder: share of clean, non-empty, field-relevant tool observations";

  auto selected = candidates[decision.winner];
  Json repair = Json::object();
  repair["requested"] = corrected.has_value();
  repair["applied"] = false;
  repair["error"] = nullptr;
  if (corrected) {
    try {
      selected = merge_repair(schema, selected, *corrected);
      repair["applied"] = true;
    } catch (const Error& e) {
      repair["error"] = e.what();
    }
  }
  log["repair"] = std::move(repair);
  log["selected"] = selected.to_json();
  return log;
}

}  // namespace boundrl::distill
