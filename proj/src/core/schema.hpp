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
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "core/json_util.hpp"

namespace boundrl::schema {

enum class Family { Interval, Optimum, Categorical, Boolean, MultiLabel };

// Report grouping, in the row order used by the metrics table.
enum class Group {
  PhysiologicalBoundary,
  PhysiologicalOptimum,
  Metabolism,
  CategoricalPhysiology,
  Morphology,
};

const char* to_string(Family family);
const char* to_string(Group group);

struct TraitField {
  std::string name;
  Family family;
  Group group;
  std::string display_name;
  std::optional<std::string> unit;
  std::vector<std::string> vocabulary;  // empty for Interval/Optimum

  bool is_numeric() const {
    return family == Family::Interval || family == Family::Optimum;
  }
};

struct IntervalVal {
  double lower = 0.0;
  double upper = 0.0;
  double midpoint() const { return 0.5 * (lower + upper); }
  friend bool operator==(const IntervalVal&, const IntervalVal&) = default;
};

struct LabelVal {
  std::string label;
  friend bool operator==(const LabelVal&, const LabelVal&) = default;
};

struct BoolVal {
  bool value = false;
  friend bool operator==(const BoolVal&, const BoolVal&) = default;
};

struct RankedLabels {
  std::vector<std::string> labels;
  friend bool operator==(const RankedLabels&, const RankedLabels&) = default;
};

using AnswerValue = std::variant<IntervalVal, LabelVal, BoolVal, RankedLabels>;

enum class FailureReason {
  NotJson,
  MultipleObjects,
  MarkdownFence,
  ExtraProse,
  MissingTargetField,
  WrongField,
  NullValue,
  ExtraFields,
  TypeMismatch,
};

const char* to_string(FailureReason reason);
std::optional<FailureReason> failure_reason_from_string(std::string_view name);

struct StrictVerdict {
  std::optional<FailureReason> failure;

  bool valid() const { return !failure.has_value(); }
  static StrictVerdict ok() { return {}; }
  static StrictVerdict fail(FailureReason reason) { return {reason}; }
  friend bool operator==(const StrictVerdict&, const StrictVerdict&) = default;
};

struct ParseResult {
  StrictVerdict verdict;
  std::optional<AnswerValue> value;  // present iff verdict.valid()
};

// Lowercases ASCII, maps runs of separators and punctuation to a single
// underscore and trims underscores. '+' is kept ("gram+" != "gram-").
std::string normalize_label(std::string_view raw);

// The trait fields with their vocabularies and alias tables. Immutable
// once constructed.
class Schema {
 public:
  // Vocabulary file document: {"version": ..., "fields": [{"field", "labels",
  // "aliases"}, ...]}.
  static Schema from_vocabulary_json(const std::string& text);

  // Process-wide schema: $BOUNDRL_DATA_DIR/vocabulary.json when that file
  // exists, otherwise the vocabulary compiled into the library.
  static const Schema& standard();

  std::span<const TraitField> fields() const { return fields_; }
  const TraitField* find(std::string_view name) const;
  const TraitField& field(std::string_view name) const;  // throws Error{Schema}

  std::optional<std::string> canonicalize_label(const TraitField& field,
                                                std::string_view raw) const;

  ParseResult parse_final_answer(std::string_view text, const TraitField& field) const;

  // Converts the value under the target key. Used for the strict parse and
  // for dataset/prediction files.
  ParseResult value_from_json(const TraitField& field, const Json& value) const;

  StrictVerdict validate_answer_schema(const TraitField& field,
                                       const AnswerValue& value) const;

  // Offline recovery of a prediction from noisy text: fences are stripped,
  // the first object carrying the target field wins, scalars are coerced.
  std::optional<AnswerValue> best_effort_parse(std::string_view text,
                                               const TraitField& field) const;

  Json value_to_json(const AnswerValue& value) const;

  // Canonical strict answer text: {"<field>": <value>}.
  std::string serialize_answer(const TraitField& field, const AnswerValue& value) const;

  // Label used for comparisons: canonical form when the label is in the
  // vocabulary, otherwise its normalized text.
  std::string comparison_key(const TraitField& field, std::string_view label) const;

 private:
  std::vector<TraitField> fields_;
  // field name -> normalized surface form -> canonical label
  std::map<std::string, std::map<std::string, std::string, std::less<>>, std::less<>> lookup_;
};

// Constructors that enforce the AnswerValue invariants.
IntervalVal make_interval(double lower, double upper);  // throws on invalid
RankedLabels make_ranked(const Schema& schema, const TraitField& field,
                         const std::vector<std::string>& raw_labels);

}  // namespace boundrl::schema
