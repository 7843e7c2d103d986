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
#include <set>
#include <span>
#include <string>
#include <vector>

#include "core/schema.hpp"

namespace boundrl::metrics {

struct EvalInstance {
  std::string strain_id;
  const schema::TraitField* field = nullptr;
  schema::AnswerValue truth;
  std::optional<schema::AnswerValue> prediction;  // absent = failed prediction
};

// Fraction of instances whose predicted interval contains the truth interval.
// All instances must belong to one Interval-family field set; anything else
// throws Error{InvalidArgument}.
double interval_coverage_rate(std::span<const EvalInstance> instances);

struct RmseResult {
  std::optional<double> value;  // absent when nothing was scored
  std::size_t n = 0;            // scored instances
  std::size_t failures = 0;     // absent predictions, excluded from the mean
};

// Midpoint RMSE over Optimum-family instances.
RmseResult rmse_optimum(std::span<const EvalInstance> instances);

struct ApResult {
  double value = 0.0;
  bool empty_truth = false;
};

// AP@5 over the first five entries of `ranked`; labels are compared as-is.
ApResult ap_at_5(const std::vector<std::string>& ranked, const std::set<std::string>& truth);

// Mean AP@5 over MultiLabel instances after canonicalization.
double mean_ap_at_5(const schema::Schema& schema, std::span<const EvalInstance> instances);

// Canonical exact-match rate over Categorical/Boolean instances.
double accuracy(const schema::Schema& schema, std::span<const EvalInstance> instances);

struct FieldMetric {
  std::string field;
  std::string display_name;
  schema::Group group;
  std::string metric;  // "ICR", "RMSE", "mAP@5", "Accuracy"
  std::optional<double> value;
  std::size_t n = 0;
  std::size_t failures = 0;
};

struct GroupMetric {
  schema::Group group;
  std::string metric;
  std::optional<double> mean;
  std::size_t fields = 0;  // fields with a value that entered the mean
};

struct MetricReport {
  std::vector<FieldMetric> per_field;  // every field, table order
  std::vector<GroupMetric> per_group;

  Json to_json() const;
  std::string to_table() const;
};

// Joins a dataset file (JSONL of {"strain_id", "field", "truth"}) with a
// predictions file (JSONL of {"strain_id", "field"} plus either "prediction",
// a value or null, or "answer_text", strictly parsed). Rows without a usable
// prediction are kept as failures. Malformed lines throw Error{Parse} or
// Error{Schema} naming the file and line.
std::vector<EvalInstance> load_instances(const schema::Schema& schema, const std::string& dataset_text,
                                         const std::string& predictions_text);

MetricReport evaluate(const schema::Schema& schema, std::span<const EvalInstance> instances);

}  // namespace boundrl::metrics
