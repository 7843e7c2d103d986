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


#include "boundrl/boundrl.h"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "core/distill.hpp"
#include "core/embedstore.hpp"
#include "core/error.hpp"
#include "core/gem.hpp"
#include "core/grpo.hpp"
#include "core/json_util.hpp"
#include "core/metrics.hpp"
#include "core/schema.hpp"
#include "core/tokenizer.hpp"
#include "core/trainer.hpp"

struct br_store {
  boundrl::embed::Store store;
};

struct br_models {
  boundrl::gem::ModelSet models;
};

namespace {

using boundrl::Error;
using boundrl::ErrorKind;
using boundrl::Json;

thread_local std::string g_last_error;

br_status status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return BR_ERR_INVALID_ARGUMENT;
    case ErrorKind::Io:
      return BR_ERR_IO;
    case ErrorKind::Parse:
      return BR_ERR_PARSE;
    case ErrorKind::Schema:
      return BR_ERR_SCHEMA;
    case ErrorKind::DimensionMismatch:
    case ErrorKind::DuplicateId:
    case ErrorKind::ZeroVector:
    case ErrorKind::UnknownComponent:
    case ErrorKind::MaskMisalignment:
      return BR_ERR_DATA;
    case ErrorKind::NumericalFailure:
    case ErrorKind::Divergence:
      return BR_ERR_NUMERICAL;
  }
  return BR_ERR_INTERNAL;
}

template <typename Fn>
br_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return BR_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const Json::exception& e) {
    g_last_error = e.what();
    return BR_ERR_SCHEMA;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return BR_ERR_INTERNAL;
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, message);
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

boundrl::train::TrainConfig config_from(const char* config_json) {
  if (!config_json) return {};
  return boundrl::train::TrainConfig::from_json(boundrl::parse_json(config_json, "config"));
}

Json reward_preview(const char* trajectory_json, const char* truth_json, const char* config_json,
                    double progress) {
  namespace env = boundrl::env;
  namespace grpo = boundrl::grpo;
  const auto& schema = boundrl::schema::Schema::standard();
  const auto cfg = config_from(config_json);
  cfg.reward.validate();
  cfg.advantage.validate();
  require(progress >= 0.0 && progress <= 1.0, "progress must lie in [0, 1]");

  const auto traj = env::Trajectory::from_json(boundrl::parse_json(trajectory_json, "trajectory"));
  Json truth;
  if (truth_json) {
    truth = boundrl::parse_json(truth_json, "truth");
    if (truth.is_object() && truth.contains("truth")) truth = truth["truth"];
  } else if (traj.truth) {
    truth = *traj.truth;
  } else {
    throw Error(ErrorKind::Schema, "trajectory: no truth given");
  }

  const auto scored = boundrl::train::score_trajectory_reward(schema, traj, truth, progress, cfg.reward);
  const auto masks = env::build_policy_mask(traj);
  const std::vector<double> gene(masks.size(), 0.0);
  // Single trajectory: the raw composite stands in for the group advantage.
  const auto adv = grpo::assemble_token_advantages(masks, scored.breakdown.composite, scored.breakdown.r_tool, gene,
                                                   cfg.advantage);
  const auto tokenizer = boundrl::tok::Tokenizer::for_field(schema.field(traj.field));
  const auto tokens = traj.token_stream();

  Json doc = Json::object();
  doc["strain_id"] = traj.strain_id;
  doc["field"] = traj.field;
  doc["progress"] = progress;
  doc["tool_calls"] = scored.tool_calls;
  doc["strict_verdict"] = scored.verdict.valid() ? Json("ok") : Json(to_string(*scored.verdict.failure));
  doc["breakdown"] = scored.breakdown.to_json();
  Json preview = Json::array();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!masks.policy[i]) continue;
    Json row = Json::object();
    row["index"] = i;
    row["token"] = tokenizer.decode(std::vector<int>{tokens[i]});
    row["span"] = masks.answer[i] ? "answer" : (masks.tool_call[i] ? "tool_call" : "other");
    row["advantage"] = adv.total[i];
    preview.push_back(std::move(row));
  }
  doc["token_advantage_preview"] = std::move(preview);
  return doc;
}

}  // namespace

extern "C" {

const char* br_version(void) { return "0.1.0"; }

const char* br_status_name(br_status status) {
  switch (status) {
    case BR_OK:
      return "ok";
    case BR_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case BR_ERR_IO:
      return "io";
    case BR_ERR_PARSE:
      return "parse";
    case BR_ERR_SCHEMA:
      return "schema";
    case BR_ERR_DATA:
      return "data";
    case BR_ERR_NUMERICAL:
      return "numerical";
    case BR_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* br_last_error(void) { return g_last_error.c_str(); }

void br_string_free(char* s) { std::free(s); }

br_status br_sha256_hex(const void* data, size_t size, char** out_hex) {
  return guarded([&] {
    require(out_hex && (data || size == 0), "br_sha256_hex: null argument");
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data, size, digest, &len, EVP_sha256(), nullptr) != 1) {
      throw Error(ErrorKind::NumericalFailure, "sha256 failed");
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
      std::snprintf(buf, sizeof buf, "%02x", digest[i]);
      hex += buf;
    }
    emit(out_hex, hex);
  });
}

br_status br_config_show(const char* config_json, char** out_json) {
  return guarded([&] {
    require(out_json, "br_config_show: null output");
    const auto cfg = config_from(config_json);
    cfg.validate(boundrl::schema::Schema::standard());
    emit(out_json, cfg.to_json().dump(2));
  });
}

br_status br_store_open(const char* jsonl_text, br_store** out) {
  return guarded([&] {
    require(jsonl_text && out, "br_store_open: null argument");
    *out = nullptr;
    auto store = boundrl::embed::Store::load_jsonl(jsonl_text, boundrl::schema::Schema::standard());
    *out = new br_store{std::move(store)};
  });
}

void br_store_close(br_store* store) { delete store; }

size_t br_store_size(const br_store* store) { return store ? store->store.size() : 0; }

size_t br_store_dimension(const br_store* store) { return store ? store->store.dimension() : 0; }

br_status br_rag_observation(const br_store* store, const char* handle, const char* fields_json, char** out_text) {
  return guarded([&] {
    require(store && handle && out_text, "br_rag_observation: null argument");
    const auto& schema = boundrl::schema::Schema::standard();
    std::vector<std::string> fields;
    if (fields_json) {
      const auto doc = boundrl::parse_json(fields_json, "fields");
      require(doc.is_array(), "fields must be a JSON list of field names");
      for (const auto& f : doc) {
        require(f.is_string() && schema.find(f.get<std::string>()), "fields must be a JSON list of field names");
        fields.push_back(f.get<std::string>());
      }
    } else {
      for (const auto& f : schema.fields()) fields.push_back(f.name);
    }
    boundrl::embed::RagQuery query;
    query.handle = handle;
    Json doc;
    if (store->store.find(handle)) {
      doc = store->store.rag_observation(schema, query, fields);
    } else {
      doc = Json::object();
      doc["tool"] = "rag_tool";
      doc["top_similar_records"] = Json::array();
      doc["retrieved_count"] = 0;
      doc["error"] = std::string("unknown handle: ") + handle;
    }
    emit(out_text, boundrl::embed::render_observation(doc));
  });
}

br_status br_models_open(const char* models_json, br_models** out) {
  return guarded([&] {
    require(out, "br_models_open: null output");
    *out = nullptr;
    auto models = models_json ? boundrl::gem::ModelSet::from_json_text(models_json) : boundrl::gem::ModelSet::toy();
    *out = new br_models{std::move(models)};
  });
}

void br_models_close(br_models* models) { delete models; }

br_status br_gem_observation(const br_models* models, int config_id, char** out_text) {
  return guarded([&] {
    require(models && out_text, "br_gem_observation: null argument");
    emit(out_text, boundrl::embed::render_observation(models->models.observation(config_id)));
  });
}

br_status br_parse_answer(const char* field, const char* text, char** out_json) {
  return guarded([&] {
    require(field && text && out_json, "br_parse_answer: null argument");
    const auto& schema = boundrl::schema::Schema::standard();
    const auto& f = schema.field(field);
    const auto parsed = schema.parse_final_answer(text, f);
    Json doc = Json::object();
    doc["valid"] = parsed.verdict.valid();
    doc["failure_reason"] = parsed.verdict.valid() ? Json(nullptr) : Json(to_string(*parsed.verdict.failure));
    doc["value"] = parsed.value ? schema.value_to_json(*parsed.value) : Json(nullptr);
    const auto loose = schema.best_effort_parse(text, f);
    doc["best_effort"] = loose ? schema.value_to_json(*loose) : Json(nullptr);
    emit(out_json, doc.dump());
  });
}

br_status br_eval(const char* dataset_jsonl, const char* predictions_jsonl, char** out_report_json,
                  char** out_table) {
  return guarded([&] {
    require(dataset_jsonl && predictions_jsonl, "br_eval: null argument");
    const auto& schema = boundrl::schema::Schema::standard();
    const auto instances = boundrl::metrics::load_instances(schema, dataset_jsonl, predictions_jsonl);
    const auto report = boundrl::metrics::evaluate(schema, instances);
    emit(out_report_json, report.to_json().dump(2));
    emit(out_table, report.to_table());
  });
}

br_status br_reward(const char* trajectory_json, const char* truth_json, const char* config_json, double progress,
                    char** out_json) {
  return guarded([&] {
    require(trajectory_json && out_json, "br_reward: null argument");
    emit(out_json, reward_preview(trajectory_json, truth_json, config_json, progress).dump(2));
  });
}

br_status br_train_toy(const char* config_json, int jobs, br_step_callback callback, void* user,
                       char** out_summary_json, char** out_params_json) {
  return guarded([&] {
    require(jobs >= 1, "jobs must be at least 1");
    const auto cfg = config_from(config_json);
    std::function<void(const boundrl::train::StepReport&)> on_step;
    if (callback) {
      on_step = [&](const boundrl::train::StepReport& s) { callback(s.to_json().dump().c_str(), user); };
    }
    const auto report = boundrl::train::train_toy(cfg, on_step, jobs);
    emit(out_summary_json, report.summary_json().dump(2));
    emit(out_params_json, report.params.to_json().dump());
  });
}

br_status br_distill_bundle(const char* bundle_json, char** out_json) {
  return guarded([&] {
    require(bundle_json && out_json, "br_distill_bundle: null argument");
    const auto& schema = boundrl::schema::Schema::standard();
    emit(out_json, boundrl::distill::distill_bundle(schema, boundrl::parse_json(bundle_json, "bundle")).dump());
  });
}

}  // extern "C"
