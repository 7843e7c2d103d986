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


#ifndef BOUNDRL_BOUNDRL_H_
#define BOUNDRL_BOUNDRL_H_

#include <stddef.h>

#if defined(BOUNDRL_BUILDING_LIBRARY)
#define BR_API __attribute__((visibility("default")))
#else
#define BR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum br_status {
  BR_OK = 0,
  BR_ERR_INVALID_ARGUMENT = 1,
  BR_ERR_IO = 2,
  BR_ERR_PARSE = 3,
  BR_ERR_SCHEMA = 4,
  BR_ERR_DATA = 5,  // dimension mismatch, duplicate id, zero vector, unknown component
  BR_ERR_NUMERICAL = 6,
  BR_ERR_INTERNAL = 7
} br_status;

typedef struct br_store br_store;
typedef struct br_models br_models;

// Called once per training step with the step report as a JSON object.
typedef void (*br_step_callback)(const char* step_json, void* user);

BR_API const char* br_version(void);
BR_API const char* br_status_name(br_status status);

// Message of the last failing call on this thread; "" if none.
BR_API const char* br_last_error(void);

// Every char** output is heap allocated and released with br_string_free.
BR_API void br_string_free(char* s);

BR_API br_status br_sha256_hex(const void* data, size_t size, char** out_hex);

// Default training configuration, or `config_json` validated and completed
// with defaults when non-NULL.
BR_API br_status br_config_show(const char* config_json, char** out_json);

// Genome store from JSONL records {"strain_id", "embedding", "phenotypes"}.
BR_API br_status br_store_open(const char* jsonl_text, br_store** out);
BR_API void br_store_close(br_store* store);
BR_API size_t br_store_size(const br_store* store);
BR_API size_t br_store_dimension(const br_store* store);

// Rendered rag_tool observation. `fields_json` is a JSON list of field
// names, or NULL for every field. An unknown handle yields BR_OK and an
// in-band error document.
BR_API br_status br_rag_observation(const br_store* store, const char* handle, const char* fields_json,
                                    char** out_text);

// Metabolic model set; `models_json` NULL loads the built-in toy models.
BR_API br_status br_models_open(const char* models_json, br_models** out);
BR_API void br_models_close(br_models* models);

// Rendered gem_tool observation. Ids outside 1..18 fail with
// BR_ERR_INVALID_ARGUMENT; simulation failures are reported in-band.
BR_API br_status br_gem_observation(const br_models* models, int config_id, char** out_text);

// Strict parse of a final answer: {"valid", "failure_reason", "value", "best_effort"}.
BR_API br_status br_parse_answer(const char* field, const char* text, char** out_json);

// Metric report over JSONL dataset and predictions.
BR_API br_status br_eval(const char* dataset_jsonl, const char* predictions_jsonl, char** out_report_json,
                         char** out_table);

// Reward breakdown and token-advantage preview for one trajectory dump.
// `truth_json` NULL uses the truth stored in the dump; `config_json` NULL
// uses the default training configuration.
BR_API br_status br_reward(const char* trajectory_json, const char* truth_json, const char* config_json,
                           double progress, char** out_json);

// Runs toy GRPO training. Outputs the run summary and the final policy
// parameters. `callback` may be NULL.
BR_API br_status br_train_toy(const char* config_json, int jobs, br_step_callback callback, void* user,
                              char** out_summary_json, char** out_params_json);

// Distills one candidate bundle {"sample_id", "field", "truth",
// "candidates", optional "corrected_answer"} into its decision log.
BR_API br_status br_distill_bundle(const char* bundle_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif  // BOUNDRL_BOUNDRL_H_
