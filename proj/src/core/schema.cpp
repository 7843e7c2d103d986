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

#include "core/schema.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>

#include "core/embedded_data.hpp"
#include "core/error.hpp"

namespace boundrl::schema {

const char* to_string(Family family) {
  switch (family) {
    case Family::Interval: return "interval";
    case Family::Optimum: return "optimum";
    case Family::Categorical: return "categorical";
    case Family::Boolean: return "boolean";
    case Family::MultiLabel: return "multi_label";
  }
  return "?";
}

const char* to_string(Group group) {
  switch (group) {
    case Group::PhysiologicalBoundary: return "Physiological Boundary";
    case Group::PhysiologicalOptimum: return "Physiological Optimum";
    case Group::Metabolism: return "Metabolism";
    case Group::CategoricalPhysiology: return "Categorical Physiology";
    case Group::Morphology: return "Morphology";
  }
  return "?";
}

namespace {

constexpr std::pair<FailureReason, const char*> kReasonNames[] = {
    {FailureReason::NotJson, "NotJson"},
    {FailureReason::MultipleObjects, "MultipleObjects"},
    {FailureReason::MarkdownFence, "MarkdownFence"},
    {FailureReason::ExtraProse, "ExtraProse"},
    {FailureReason::MissingTargetField, "MissingTargetField"},
    {FailureReason::WrongField, "WrongField"},
    {FailureReason::NullValue, "NullValue"},
    {FailureReason::ExtraFields, "ExtraFields"},
    {FailureReason::TypeMismatch, "TypeMismatch"},
};

struct FieldDef {
  const char* name;
  Family family;
  Group group;
  const char* display;
  const char* unit;
};

// Row order of the report table.
constexpr FieldDef kFieldDefs[] = {
    {"growth_temperature_range_C", Family::Interval, Group::PhysiologicalBoundary, "Growth temperature range", "°C"},
    {"pH_range", Family::Interval, Group::PhysiologicalBoundary, "pH range", "pH units"},
    {"salinity_range", Family::Interval, Group::PhysiologicalBoundary, "Salinity range", "%w/v"},
    {"growth_temperature_opt_C", Family::Optimum, Group::PhysiologicalOptimum, "Optimal growth temperature", "°C"},
    {"pH_opt", Family::Optimum, Group::PhysiologicalOptimum, "Optimal pH", "pH units"},
    {"salinity_opt_wv_percent", Family::Optimum, Group::PhysiologicalOptimum, "Optimal salinity", "%w/v"},
    {"carbon_source", Family::MultiLabel, Group::Metabolism, "Carbon source", nullptr},
    {"electron_acceptor", Family::MultiLabel, Group::Metabolism, "Electron acceptor", nullptr},
    {"electron_donor", Family::MultiLabel, Group::Metabolism, "Electron donor", nullptr},
    {"nitrogen_source", Family::MultiLabel, Group::Metabolism, "Nitrogen source", nullptr},
    {"carbon_fixation_pathway", Family::Categorical, Group::CategoricalPhysiology, "Carbon fixation pathway", nullptr},
    {"energy_type", Family::Categorical, Group::CategoricalPhysiology, "Energy type", nullptr},
    {"oxygen_tolerance", Family::Categorical, Group::CategoricalPhysiology, "Oxygen tolerance", nullptr},
    {"photosynthesis_type", Family::Categorical, Group::CategoricalPhysiology, "Photosynthesis type", nullptr},
    {"cell_shape", Family::Categorical, Group::Morphology, "Cell shape", nullptr},
    {"flagella", Family::Categorical, Group::Morphology, "Flagella", nullptr},
    {"gram_stain", Family::Categorical, Group::Morphology, "Gram stain", nullptr},
    {"motility", Family::Boolean, Group::Morphology, "Motility", nullptr},
    {"spore_formation", Family::Boolean, Group::Morphology, "Spore formation", nullptr},
};

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool contains_null(const Json& value) {
  if (value.is_null()) return true;
  if (value.is_structured()) {
    for (const auto& item : value) {
      if (contains_null(item)) return true;
    }
  }
  return false;
}

// Byte ranges of brace-balanced top-level objects, honoring string literals.
std::vector<std::string_view> object_spans(std::string_view text) {
  std::vector<std::string_view> spans;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (depth > 0 && in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (depth > 0 && c == '"') {
      in_string = true;
    } else if (c == '{') {
      if (depth == 0) start = i;
      ++depth;
    } else if (c == '}' && depth > 0) {
      if (--depth == 0) spans.push_back(text.substr(start, i - start + 1));
    }
  }
  return spans;
}

std::optional<Json> try_parse(std::string_view text) {
  Json doc = Json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return std::nullopt;
  return doc;
}

}  // namespace

const char* to_string(FailureReason reason) {
  for (const auto& [r, name] : kReasonNames) {
    if (r == reason) return name;
  }
  return "?";
}

std::optional<FailureReason> failure_reason_from_string(std::string_view name) {
  for (const auto& [r, n] : kReasonNames) {
    if (name == n) return r;
  }
  return std::nullopt;
}

std::string normalize_label(std::string_view raw) {
  std::string out;
  bool pending_sep = false;
  for (unsigned char c : trim(raw)) {
    const bool keep = std::isalnum(c) || c == '+' || c >= 0x80;
    if (keep) {
      if (pending_sep && !out.empty()) out += '_';
      pending_sep = false;
      out += static_cast<char>(std::tolower(c));
    } else {
      pending_sep = true;
    }
  }
  return out;
}

Schema Schema::from_vocabulary_json(const std::string& text) {
  const Json doc = parse_json(text, "vocabulary file");
  if (!doc.is_object() || !doc.contains("fields") || !doc["fields"].is_array()) {
    throw Error(ErrorKind::Schema, "vocabulary file: expected an object with a \"fields\" array");
  }
  std::map<std::string, const Json*, std::less<>> entries;
  for (const auto& entry : doc["fields"]) {
    if (!entry.is_object() || !entry.contains("field") || !entry["field"].is_string()) {
      throw Error(ErrorKind::Schema, "vocabulary file: entry without a \"field\" name");
    }
    const auto name = entry["field"].get<std::string>();
    if (!entries.emplace(name, &entry).second) {
      throw Error(ErrorKind::Schema, "vocabulary file: duplicate entry for " + name);
    }
  }

  Schema schema;
  for (const auto& def : kFieldDefs) {
    TraitField field{def.name, def.family, def.group, def.display,
                     def.unit ? std::optional<std::string>(def.unit) : std::nullopt, {}};
    auto& lookup = schema.lookup_[field.name];
    const auto it = entries.find(field.name);
    if (field.is_numeric()) {
      if (it != entries.end() && it->second->contains("labels") &&
          !(*it->second)["labels"].empty()) {
        throw Error(ErrorKind::Schema, "vocabulary file: numeric field " + field.name +
                                           " must not declare labels");
      }
      schema.fields_.push_back(std::move(field));
      continue;
    }
    if (it == entries.end()) {
      throw Error(ErrorKind::Schema, "vocabulary file: missing field " + field.name);
    }
    const Json& entry = *it->second;
    if (!entry.contains("labels") || !entry["labels"].is_array() || entry["labels"].empty()) {
      throw Error(ErrorKind::Schema, "vocabulary file: " + field.name + " needs labels");
    }
    for (const auto& label : entry["labels"]) {
      const auto text_label = label.get<std::string>();
      const auto key = normalize_label(text_label);
      if (key.empty() || !lookup.emplace(key, text_label).second) {
        throw Error(ErrorKind::Schema, "vocabulary file: " + field.name +
                                           " has colliding label " + text_label);
      }
      field.vocabulary.push_back(text_label);
    }
    if (field.family == Family::Boolean &&
        field.vocabulary != std::vector<std::string>{"true", "false"}) {
      throw Error(ErrorKind::Schema, "vocabulary file: boolean field " + field.name +
                                         " must have labels [\"true\", \"false\"]");
    }
    if (entry.contains("aliases")) {
      for (const auto& [raw, target] : entry["aliases"].items()) {
        const auto canonical = target.get<std::string>();
        if (std::find(field.vocabulary.begin(), field.vocabulary.end(), canonical) ==
            field.vocabulary.end()) {
          throw Error(ErrorKind::Schema, "vocabulary file: alias " + raw + " of " +
                                             field.name + " targets unknown label " + canonical);
        }
        const auto key = normalize_label(raw);
        const auto [pos, inserted] = lookup.emplace(key, canonical);
        if (!inserted && pos->second != canonical) {
          throw Error(ErrorKind::Schema, "vocabulary file: alias " + raw + " of " +
                                             field.name + " is ambiguous");
        }
      }
    }
    schema.fields_.push_back(std::move(field));
  }
  for (const auto& [name, _] : entries) {
    if (!schema.find(name)) {
      throw Error(ErrorKind::Schema, "vocabulary file: unknown field " + name);
    }
  }
  return schema;
}

const Schema& Schema::standard() {
  static const Schema instance = [] {
    if (const char* dir = std::getenv("BOUNDRL_DATA_DIR"); dir && *dir) {
      const auto path = std::filesystem::path(dir) / "vocabulary.json";
      if (std::filesystem::exists(path)) return from_vocabulary_json(read_text_file(path));
    }
    return from_vocabulary_json(std::string(embedded::vocabulary_json()));
  }();
  return instance;
}

const TraitField* Schema::find(std::string_view name) const {
  for (const auto& f : fields_) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const TraitField& Schema::field(std::string_view name) const {
  if (const auto* f = find(name)) return *f;
  throw Error(ErrorKind::Schema, "unknown trait field: " + std::string(name));
}

std::optional<std::string> Schema::canonicalize_label(const TraitField& field,
                                                      std::string_view raw) const {
  const auto table = lookup_.find(field.name);
  if (table == lookup_.end()) return std::nullopt;
  const auto hit = table->second.find(normalize_label(raw));
  if (hit == table->second.end()) return std::nullopt;
  return hit->second;
}

std::string Schema::comparison_key(const TraitField& field, std::string_view label) const {
  if (auto canonical = canonicalize_label(field, label)) return *canonical;
  return normalize_label(label);
}

ParseResult Schema::value_from_json(const TraitField& field, const Json& value) const {
  const auto mismatch = [] { return ParseResult{StrictVerdict::fail(FailureReason::TypeMismatch), {}}; };
  if (contains_null(value)) return {StrictVerdict::fail(FailureReason::NullValue), {}};

  switch (field.family) {
    case Family::Interval:
    case Family::Optimum: {
      if (!value.is_object() || value.size() != 2 || !value.contains("lower") ||
          !value.contains("upper")) {
        return mismatch();
      }
      const Json& lo = value["lower"];
      const Json& hi = value["upper"];
      if (!lo.is_number() || !hi.is_number()) return mismatch();
      const double lower = lo.get<double>();
      const double upper = hi.get<double>();
      if (!std::isfinite(lower) || !std::isfinite(upper) || lower > upper) return mismatch();
      return {StrictVerdict::ok(), IntervalVal{lower, upper}};
    }
    case Family::Categorical: {
      if (!value.is_string()) return mismatch();
      const auto raw = std::string(trim(value.get_ref<const std::string&>()));
      if (raw.empty()) return mismatch();
      return {StrictVerdict::ok(), LabelVal{canonicalize_label(field, raw).value_or(raw)}};
    }
    case Family::Boolean: {
      if (!value.is_boolean()) return mismatch();
      return {StrictVerdict::ok(), BoolVal{value.get<bool>()}};
    }
    case Family::MultiLabel: {
      if (!value.is_array()) return mismatch();
      std::vector<std::string> raw;
      for (const auto& item : value) {
        if (!item.is_string()) return mismatch();
        const auto s = std::string(trim(item.get_ref<const std::string&>()));
        if (s.empty()) return mismatch();
        raw.push_back(s);
      }
      return {StrictVerdict::ok(), make_ranked(*this, field, raw)};
    }
  }
  return mismatch();
}

ParseResult Schema::parse_final_answer(std::string_view text, const TraitField& field) const {
  const auto fail = [](FailureReason r) { return ParseResult{StrictVerdict::fail(r), {}}; };
  const auto body = trim(text);
  if (body.empty()) return fail(FailureReason::NotJson);
  if (body.find("```") != std::string_view::npos) return fail(FailureReason::MarkdownFence);

  std::optional<Json> doc = try_parse(body);
  if (!doc) {
    std::size_t objects = 0;
    for (const auto span : object_spans(body)) {
      if (auto parsed = try_parse(span); parsed && parsed->is_object()) ++objects;
    }
    if (objects >= 2) return fail(FailureReason::MultipleObjects);
    if (objects == 1) return fail(FailureReason::ExtraProse);
    return fail(FailureReason::NotJson);
  }
  if (!doc->is_object()) return fail(FailureReason::NotJson);

  if (!doc->contains(field.name)) {
    for (const auto& [key, _] : doc->items()) {
      if (find(key)) return fail(FailureReason::WrongField);
    }
    return fail(FailureReason::MissingTargetField);
  }
  if (doc->size() != 1) return fail(FailureReason::ExtraFields);
  return value_from_json(field, (*doc)[field.name]);
}

StrictVerdict Schema::validate_answer_schema(const TraitField& field,
                                             const AnswerValue& value) const {
  const auto mismatch = StrictVerdict::fail(FailureReason::TypeMismatch);
  switch (field.family) {
    case Family::Interval:
    case Family::Optimum: {
      const auto* v = std::get_if<IntervalVal>(&value);
      if (!v || !std::isfinite(v->lower) || !std::isfinite(v->upper) || v->lower > v->upper) {
        return mismatch;
      }
      return StrictVerdict::ok();
    }
    case Family::Categorical: {
      const auto* v = std::get_if<LabelVal>(&value);
      if (!v || trim(v->label).empty()) return mismatch;
      return StrictVerdict::ok();
    }
    case Family::Boolean:
      return std::holds_alternative<BoolVal>(value) ? StrictVerdict::ok() : mismatch;
    case Family::MultiLabel: {
      const auto* v = std::get_if<RankedLabels>(&value);
      if (!v || v->labels.size() > field.vocabulary.size()) return mismatch;
      std::set<std::string> seen;
      for (const auto& label : v->labels) {
        if (trim(label).empty() || !seen.insert(comparison_key(field, label)).second) {
          return mismatch;
        }
      }
      return StrictVerdict::ok();
    }
  }
  return mismatch;
}

std::optional<AnswerValue> Schema::best_effort_parse(std::string_view text,
                                                     const TraitField& field) const {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, 3, "```") == 0) {
      i += 3;
      while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
      continue;
    }
    cleaned += text[i++];
  }

  const auto coerce = [&](const Json& value) -> std::optional<AnswerValue> {
    if (auto strict = value_from_json(field, value); strict.verdict.valid()) return strict.value;
    if (contains_null(value)) return std::nullopt;
    switch (field.family) {
      case Family::Interval:
      case Family::Optimum:
        if (value.is_number()) {
          const double x = value.get<double>();
          if (std::isfinite(x)) return IntervalVal{x, x};
        }
        if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
          const double a = value[0].get<double>();
          const double b = value[1].get<double>();
          if (std::isfinite(a) && std::isfinite(b)) return IntervalVal{std::min(a, b), std::max(a, b)};
        }
        if (value.is_object() && value.contains("lower") && value.contains("upper") &&
            value["lower"].is_number() && value["upper"].is_number()) {
          const double a = value["lower"].get<double>();
          const double b = value["upper"].get<double>();
          if (std::isfinite(a) && std::isfinite(b)) return IntervalVal{std::min(a, b), std::max(a, b)};
        }
        return std::nullopt;
      case Family::Boolean:
        if (value.is_string()) {
          if (auto c = canonicalize_label(field, value.get<std::string>())) return BoolVal{*c == "true"};
        }
        return std::nullopt;
      case Family::Categorical:
        if (value.is_array() && !value.empty() && value[0].is_string()) {
          return LabelVal{comparison_key(field, value[0].get<std::string>())};
        }
        return std::nullopt;
      case Family::MultiLabel:
        if (value.is_string()) return make_ranked(*this, field, {value.get<std::string>()});
        return std::nullopt;
    }
    return std::nullopt;
  };

  for (const auto span : object_spans(cleaned)) {
    auto doc = try_parse(span);
    if (!doc || !doc->is_object() || !doc->contains(field.name)) continue;
    if (auto v = coerce((*doc)[field.name])) return v;
  }
  return std::nullopt;
}

Json Schema::value_to_json(const AnswerValue& value) const {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IntervalVal>) {
          Json obj = Json::object();
          obj["lower"] = v.lower;
          obj["upper"] = v.upper;
          return obj;
        } else if constexpr (std::is_same_v<T, LabelVal>) {
          return v.label;
        } else if constexpr (std::is_same_v<T, BoolVal>) {
          return v.value;
        } else {
          return Json(v.labels);
        }
      },
      value);
}

std::string Schema::serialize_answer(const TraitField& field, const AnswerValue& value) const {
  Json doc = Json::object();
  doc[field.name] = value_to_json(value);
  return dump_inline(doc);
}

IntervalVal make_interval(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || lower > upper) {
    throw Error(ErrorKind::InvalidArgument, "interval requires finite lower <= upper");
  }
  return {lower, upper};
}

RankedLabels make_ranked(const Schema& schema, const TraitField& field,
                         const std::vector<std::string>& raw_labels) {
  RankedLabels out;
  std::set<std::string> seen;
  for (const auto& raw : raw_labels) {
    const auto trimmed = std::string(trim(raw));
    if (trimmed.empty()) continue;
    auto label = schema.canonicalize_label(field, trimmed).value_or(trimmed);
    if (!seen.insert(schema.comparison_key(field, label)).second) continue;
    out.labels.push_back(std::move(label));
    if (out.labels.size() == field.vocabulary.size()) break;
  }
  return out;
}

}  // namespace boundrl::schema
