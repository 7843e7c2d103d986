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

#include "core/agent_env.hpp"

#include <algorithm>
#include <cctype>

#include "core/error.hpp"

namespace boundrl::env {

namespace {

constexpr std::string_view kSystemText = "Answer with exactly one JSON object. Tools: rag_tool, gem_tool.";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<Role> role_from_string(std::string_view s) {
  for (auto r : {Role::System, Role::User, Role::Assistant, Role::Tool}) {
    if (s == to_string(r)) return r;
  }
  return std::nullopt;
}

std::optional<Origin> origin_from_string(std::string_view s) {
  for (auto o : {Origin::ModelGenerated, Origin::EnvironmentInserted}) {
    if (s == to_string(o)) return o;
  }
  return std::nullopt;
}

Json mask_json(const std::vector<std::uint8_t>& m) {
  Json out = Json::array();
  for (auto v : m) out.push_back(static_cast<int>(v));
  return out;
}

std::optional<std::size_t> last_tool_open(const std::vector<int>& ids) {
  for (std::size_t i = ids.size(); i-- > 0;) {
    if (ids[i] == tok::kToolOpen) return i;
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::Tool: return "tool";
  }
  return "?";
}

const char* to_string(Origin origin) {
  return origin == Origin::ModelGenerated ? "model" : "environment";
}

std::vector<int> Trajectory::token_stream() const {
  std::vector<int> out;
  for (const auto& t : turns) out.insert(out.end(), t.token_ids.begin(), t.token_ids.end());
  return out;
}

std::vector<double> Trajectory::old_logprobs() const {
  std::vector<double> out;
  for (const auto& t : turns) {
    if (t.origin == Origin::ModelGenerated && t.logprobs.size() == t.token_ids.size()) {
      out.insert(out.end(), t.logprobs.begin(), t.logprobs.end());
    } else {
      out.insert(out.end(), t.token_ids.size(), 0.0);
    }
  }
  return out;
}

std::size_t Trajectory::num_tokens() const {
  std::size_t n = 0;
  for (const auto& t : turns) n += t.token_ids.size();
  return n;
}

const Turn* Trajectory::final_assistant_turn() const {
  if (turns.empty() || turns.back().role != Role::Assistant) return nullptr;
  return &turns.back();
}

Json Trajectory::to_json() const {
  Json doc = Json::object();
  doc["strain_id"] = strain_id;
  doc["field"] = field;
  doc["handle"] = handle;
  doc["gene"] = gene;
  Json jt = Json::array();
  for (const auto& t : turns) {
    Json e = Json::object();
    e["role"] = to_string(t.role);
    e["origin"] = to_string(t.origin);
    e["text"] = t.text;
    e["token_ids"] = t.token_ids;
    if (t.origin == Origin::ModelGenerated) e["logprobs"] = t.logprobs;
    e["tool_block_start"] = t.tool_block_start ? Json(*t.tool_block_start) : Json(nullptr);
    jt.push_back(std::move(e));
  }
  doc["turns"] = std::move(jt);
  Json calls = Json::array();
  for (const auto& c : tool_calls) {
    Json e = Json::object();
    e["round"] = c.round;
    e["tool"] = c.tool;
    e["arguments"] = c.arguments;
    e["observation"] = c.observation;
    e["errored"] = c.errored;
    calls.push_back(std::move(e));
  }
  doc["tool_calls"] = std::move(calls);
  doc["final_answer_text"] = final_answer_text ? Json(*final_answer_text) : Json(nullptr);
  doc["repaired"] = repaired;
  if (truth) doc["truth"] = *truth;
  const auto masks = build_policy_mask(*this);
  Json jm = Json::object();
  jm["policy"] = mask_json(masks.policy);
  jm["answer"] = mask_json(masks.answer);
  jm["tool_call"] = mask_json(masks.tool_call);
  doc["masks"] = std::move(jm);
  return doc;
}

Trajectory Trajectory::from_json(const Json& doc) {
  Trajectory t;
  try {
    t.strain_id = doc.value("strain_id", "");
    t.field = doc.at("field").get<std::string>();
    t.handle = doc.value("handle", t.strain_id);
    if (doc.contains("gene")) t.gene = doc.at("gene").get<std::vector<double>>();
    for (const auto& e : doc.at("turns")) {
      Turn turn;
      const auto role = role_from_string(e.at("role").get<std::string>());
      const auto origin = origin_from_string(e.at("origin").get<std::string>());
      if (!role || !origin) throw Error(ErrorKind::Schema, "trajectory: unknown role or origin");
      turn.role = *role;
      turn.origin = *origin;
      if ((turn.role == Role::Tool && turn.origin != Origin::EnvironmentInserted) ||
          (turn.role == Role::Assistant && turn.origin != Origin::ModelGenerated)) {
        throw Error(ErrorKind::Schema, "trajectory: role and origin disagree");
      }
      turn.text = e.at("text").get<std::string>();
      turn.token_ids = e.at("token_ids").get<std::vector<int>>();
      if (e.contains("logprobs")) turn.logprobs = e.at("logprobs").get<std::vector<double>>();
      if (e.contains("tool_block_start") && !e["tool_block_start"].is_null()) {
        turn.tool_block_start = e["tool_block_start"].get<std::size_t>();
        if (*turn.tool_block_start > turn.token_ids.size()) {
          throw Error(ErrorKind::MaskMisalignment, "trajectory: tool_block_start past the end of its turn");
        }
      }
      t.turns.push_back(std::move(turn));
    }
    for (const auto& e : doc.at("tool_calls")) {
      ToolCallRecord c;
      c.round = e.at("round").get<int>();
      c.tool = e.at("tool").get<std::string>();
      c.arguments = e.at("arguments");
      c.observation = e.at("observation");
      c.errored = e.at("errored").get<bool>();
      t.tool_calls.push_back(std::move(c));
    }
    if (doc.contains("final_answer_text") && !doc["final_answer_text"].is_null()) {
      t.final_answer_text = doc["final_answer_text"].get<std::string>();
    }
    t.repaired = doc.value("repaired", false);
    if (doc.contains("truth")) t.truth = doc["truth"];
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("trajectory: ") + e.what());
  }
  return t;
}

void RolloutConfig::validate() const {
  if (max_tool_rounds < 1 || max_new_tokens < 1) {
    throw Error(ErrorKind::InvalidArgument, "rollout caps must be positive");
  }
  sampling.validate();
}

PolicyMask build_policy_mask(const Trajectory& traj) {
  PolicyMask m;
  const std::size_t n = traj.num_tokens();
  m.policy.assign(n, 0);
  m.answer.assign(n, 0);
  m.tool_call.assign(n, 0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < traj.turns.size(); ++i) {
    const auto& turn = traj.turns[i];
    const std::size_t len = turn.token_ids.size();
    if (turn.origin == Origin::ModelGenerated) {
      const std::size_t block = turn.tool_block_start.value_or(len);
      const bool is_final = i + 1 == traj.turns.size() && turn.role == Role::Assistant;
      for (std::size_t k = 0; k < len; ++k) {
        m.policy[offset + k] = 1;
        if (k >= block) {
          m.tool_call[offset + k] = 1;
        } else if (is_final) {
          m.answer[offset + k] = 1;
        }
      }
    }
    offset += len;
  }
  return m;
}

Detection detect_tool_call(std::string_view text) {
  Detection d;
  const auto open = text.rfind(tok::kToolOpenText);
  if (open == std::string_view::npos) return d;
  const auto rest = text.substr(open + tok::kToolOpenText.size());
  const auto close = rest.find(tok::kToolCloseText);
  if (close == std::string_view::npos) {
    d.status = CallStatus::Malformed;
    d.block_start = open;
    return d;
  }
  if (!trim(rest.substr(close + tok::kToolCloseText.size())).empty()) return d;
  d.block_start = open;
  d.status = CallStatus::Malformed;
  const auto body = nlohmann::ordered_json::parse(rest.substr(0, close), nullptr, false);
  if (body.is_discarded() || !body.is_object() || !body.contains("name") || !body["name"].is_string()) return d;
  ToolRequest req;
  req.tool = body["name"].get<std::string>();
  if (body.contains("arguments")) {
    if (!body["arguments"].is_object()) return d;
    req.arguments = body["arguments"];
  }
  for (const auto& [key, value] : body.items()) {
    if (key != "name" && key != "arguments") return d;
  }
  d.status = CallStatus::Call;
  d.request = std::move(req);
  return d;
}

std::optional<std::string> extract_final_answer(const Trajectory& traj) {
  const auto* turn = traj.final_assistant_turn();
  if (!turn) return std::nullopt;
  const auto det = detect_tool_call(turn->text);
  if (det.status == CallStatus::Malformed) return std::nullopt;
  std::string_view text = turn->text;
  if (det.status == CallStatus::Call) text = text.substr(0, det.block_start);
  text = trim(text);
  if (text.empty()) return std::nullopt;
  return std::string(text);
}

std::vector<Prompt> load_prompts(const std::string& text, const schema::Schema& schema, const embed::Store* store) {
  std::vector<Prompt> out;
  for (const auto& [line, doc] : parse_jsonl(text, "prompt file")) {
    const auto where = "prompt file: line " + std::to_string(line);
    if (!doc.is_object() || !doc.contains("strain_id") || !doc["strain_id"].is_string() || !doc.contains("field") ||
        !doc["field"].is_string()) {
      throw Error(ErrorKind::Schema, where + ": expected string \"strain_id\" and \"field\"");
    }
    Prompt p;
    p.strain_id = doc["strain_id"].get<std::string>();
    p.field = doc["field"].get<std::string>();
    p.handle = doc.value("handle", p.strain_id);
    const auto& field = schema.field(p.field);
    if (!doc.contains("gene")) throw Error(ErrorKind::Schema, where + ": missing gene");
    const auto& gene = doc["gene"];
    if (gene.is_string()) {
      const auto* rec = store ? store->find(gene.get<std::string>()) : nullptr;
      if (!rec) throw Error(ErrorKind::Schema, where + ": gene handle not found in the store");
      p.gene = rec->embedding;
    } else if (gene.is_array()) {
      for (const auto& x : gene) {
        if (!x.is_number()) throw Error(ErrorKind::Schema, where + ": gene entries must be numbers");
        p.gene.push_back(x.get<double>());
      }
    } else {
      throw Error(ErrorKind::Schema, where + ": gene must be a vector or a store handle");
    }
    if (doc.contains("truth")) {
      const auto parsed = schema.value_from_json(field, doc["truth"]);
      if (!parsed.verdict.valid()) throw Error(ErrorKind::Schema, where + ": invalid truth");
      p.truth = doc["truth"];
    }
    out.push_back(std::move(p));
  }
  return out;
}

int PolicySource::next(std::span<const int> context, std::span<const double> gene, Rng& rng, double& logprob) {
  return policy::sample_token(params_, context, gene, cfg_, rng, &logprob);
}

void ScriptedSource::begin_segment(int segment_index) {
  current_ = std::min(static_cast<std::size_t>(segment_index), segments_.size() - 1);
  pos_ = 0;
}

int ScriptedSource::next(std::span<const int>, std::span<const double>, Rng&, double& logprob) {
  logprob = 0.0;
  const auto& seg = segments_.at(current_);
  if (pos_ < seg.size()) return seg[pos_++];
  return tok::kEos;
}

Environment::Environment(const schema::Schema& schema, const tok::Tokenizer& tokenizer, const embed::Store* store,
                         const gem::ModelSet* models)
    : schema_(schema), tokenizer_(tokenizer), store_(store), models_(models) {}

ToolResult Environment::malformed_call() {
  Json doc = Json::object();
  doc["tool"] = nullptr;
  doc["error"] = "malformed tool call";
  return {std::move(doc), true};
}

ToolResult Environment::execute(const ToolRequest& request, const Prompt& prompt) const {
  const auto& args = request.arguments;
  if (request.tool == "rag_tool") {
    embed::RagQuery query;
    query.handle = prompt.handle;
    std::vector<std::string> fields = {prompt.field};
    std::optional<std::string> arg_error;
    if (args.contains("handle")) {
      if (args["handle"].is_string()) {
        query.handle = args["handle"].get<std::string>();
      } else {
        arg_error = "handle must be a string";
      }
    }
    if (args.contains("fields")) {
      fields.clear();
      if (!args["fields"].is_array()) arg_error = "fields must be a list of field names";
      for (const auto& f : args["fields"]) {
        if (!f.is_string() || !schema_.find(f.get<std::string>())) {
          arg_error = "fields must be a list of field names";
          break;
        }
        fields.push_back(f.get<std::string>());
      }
    }
    if (!arg_error && !store_) arg_error = "retrieval store unavailable";
    if (!arg_error) {
      try {
        return {store_->rag_observation(schema_, query, fields), false};
      } catch (const Error& e) {
        arg_error = e.what();
      }
    }
    Json doc = Json::object();
    doc["tool"] = "rag_tool";
    doc["top_similar_records"] = Json::array();
    doc["retrieved_count"] = 0;
    doc["error"] = *arg_error;
    return {std::move(doc), true};
  }
  if (request.tool == "gem_tool") {
    const auto id_arg = args.contains("config_id") ? args["config_id"] : Json(nullptr);
    if (!id_arg.is_number_integer() || id_arg.get<long long>() < 1 || id_arg.get<long long>() > 18) {
      Json doc = Json::object();
      doc["tool"] = "gem_tool";
      doc["configuration_id"] = id_arg;
      doc["minimal_substrate_dict"] = Json::object();
      doc["error"] = "configuration_id must be an integer in 1..18";
      return {std::move(doc), true};
    }
    const int id = id_arg.get<int>();
    Json doc;
    if (models_) {
      doc = models_->observation(id);
    } else {
      doc = Json::object();
      doc["tool"] = "gem_tool";
      doc["configuration_id"] = id;
      doc["minimal_substrate_dict"] = Json::object();
      doc["error"] = gem::kModelUnavailable;
    }
    const bool errored = !doc["error"].is_null();
    return {std::move(doc), errored};
  }
  Json doc = Json::object();
  doc["tool"] = request.tool;
  doc["error"] = "unknown tool";
  return {std::move(doc), true};
}

std::vector<int> Environment::encode_cached(const std::string& text) const {
  {
    std::lock_guard lock(mu_);
    if (const auto it = cache_.find(text); it != cache_.end()) return it->second;
  }
  auto ids = tokenizer_.encode(text);
  std::lock_guard lock(mu_);
  cache_.emplace(text, ids);
  return ids;
}

std::vector<Turn> Environment::prompt_turns(const Prompt& prompt) const {
  Turn sys;
  sys.role = Role::System;
  sys.text = std::string(kSystemText);
  sys.token_ids = encode_cached(sys.text);
  Turn user;
  user.role = Role::User;
  user.text = "<gene>\nhandle: " + prompt.handle + "\nfield: " + prompt.field;
  user.token_ids = encode_cached(user.text);
  return {std::move(sys), std::move(user)};
}

Trajectory Environment::run_rollout(TokenSource& source, const Prompt& prompt, const RolloutConfig& cfg,
                                    std::uint64_t seed) const {
  cfg.validate();
  Trajectory traj;
  traj.strain_id = prompt.strain_id;
  traj.field = prompt.field;
  traj.handle = prompt.handle;
  traj.gene = prompt.gene;
  traj.truth = prompt.truth;
  traj.turns = prompt_turns(prompt);
  std::vector<int> context = traj.token_stream();
  Rng rng(seed);

  for (int segment = 0;; ++segment) {
    source.begin_segment(segment);
    Turn turn;
    turn.role = Role::Assistant;
    turn.origin = Origin::ModelGenerated;
    for (int i = 0; i < cfg.max_new_tokens; ++i) {
      double lp = 0.0;
      const int t = source.next(context, traj.gene, rng, lp);
      if (t < 0 || static_cast<std::size_t>(t) >= tokenizer_.vocab_size()) {
        throw Error(ErrorKind::InvalidArgument, "token source produced id " + std::to_string(t));
      }
      turn.token_ids.push_back(t);
      turn.logprobs.push_back(lp);
      context.push_back(t);
      if (t == tok::kToolClose || t == tok::kEos) break;
    }
    turn.text = tokenizer_.decode(turn.token_ids);
    const auto det = detect_tool_call(turn.text);
    if (det.status != CallStatus::NoCall) turn.tool_block_start = last_tool_open(turn.token_ids);
    traj.turns.push_back(std::move(turn));

    const int rounds = static_cast<int>(traj.tool_calls.size());
    if (det.status == CallStatus::NoCall || rounds >= cfg.max_tool_rounds) break;

    ToolCallRecord rec;
    rec.round = rounds + 1;
    ToolResult result;
    if (det.status == CallStatus::Call) {
      rec.tool = det.request->tool;
      rec.arguments = det.request->arguments;
      result = execute(*det.request, prompt);
    } else {
      rec.arguments = Json::object();
      result = malformed_call();
    }
    rec.observation = result.observation;
    rec.errored = result.errored;

    Turn obs;
    obs.role = Role::Tool;
    obs.origin = Origin::EnvironmentInserted;
    obs.text = embed::render_observation(result.observation);
    obs.token_ids = encode_cached(obs.text);
    context.insert(context.end(), obs.token_ids.begin(), obs.token_ids.end());
    traj.turns.push_back(std::move(obs));
    traj.tool_calls.push_back(std::move(rec));
  }
  traj.final_answer_text = extract_final_answer(traj);
  return traj;
}

}  // namespace boundrl::env
