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

#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "core/error.hpp"

namespace boundrl::metrics {

using schema::Family;

namespace {

void require_family(std::span<const EvalInstance> instances, std::initializer_list<Family> allowed,
                    const char* metric) {
  for (const auto& inst : instances) {
    if (!inst.field ||
        std::find(allowed.begin(), allowed.end(), inst.field->family) == allowed.end()) {
      throw Error(ErrorKind::InvalidArgument,
                  std::string(metric) + ": instance " + inst.strain_id + " has the wrong family");
    }
  }
}

const char* metric_name(Family family) {
  switch (family) {
    case Family::Interval: return "ICR";
    case Family::Optimum: return "RMSE";
    case Family::MultiLabel: return "mAP@5";
    case Family::Categorical:
    case Family::Boolean: return "Accuracy";
  }
  return "?";
}

}  // namespace

double interval_coverage_rate(std::span<const EvalInstance> instances) {
  require_family(instances, {Family::Interval}, "ICR");
  if (instances.empty()) return 0.0;
  std::size_t covered = 0;
  for (const auto& inst : instances) {
    const auto& truth = std::get<schema::IntervalVal>(inst.truth);
    if (!inst.prediction) continue;
    const auto* pred = std::get_if<schema::IntervalVal>(&*inst.prediction);
    if (pred && pred->lower <= truth.lower && pred->upper >= truth.upper) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(instances.size());
}

RmseResult rmse_optimum(std::span<const EvalInstance> instances) {
  require_family(instances, {Family::Optimum}, "RMSE");
  RmseResult result;
  double sum_sq = 0.0;
  for (const auto& inst : instances) {
    const auto* pred = inst.prediction ? std::get_if<schema::IntervalVal>(&*inst.prediction) : nullptr;
    if (!pred) {
      ++result.failures;
      continue;
    }
    const double err = pred->midpoint() - std::get<schema::IntervalVal>(inst.truth).midpoint();
    sum_sq += err * err;
    ++result.n;
  }
  if (result.n > 0) result.value = std::sqrt(sum_sq / static_cast<double>(result.n));
  return result;
}

ApResult ap_at_5(const std::vector<std::string>& ranked, const std::set<std::string>& truth) {
  if (truth.empty()) return {0.0, true};
  const std::size_t depth = std::min<std::size_t>(ranked.size(), 5);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < depth; ++k) {
    if (truth.count(ranked[k])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return {sum / static_cast<double>(std::min<std::size_t>(truth.size(), 5)), false};
}

double mean_ap_at_5(const schema::Schema& schema, std::span<const EvalInstance> instances) {
  require_family(instances, {Family::MultiLabel}, "mAP@5");
  if (instances.empty()) return 0.0;
  double total = 0.0;
  for (const auto& inst : instances) {
    if (!inst.prediction) continue;
    const auto* pred = std::get_if<schema::RankedLabels>(&*inst.prediction);
    if (!pred) continue;
    std::set<std::string> truth;
    for (const auto& label : std::get<schema::RankedLabels>(inst.truth).labels) {
      truth.insert(schema.comparison_key(*inst.field, label));
    }
    std::vector<std::string> ranked;
    for (const auto& label : pred->labels) {
      auto key = schema.comparison_key(*inst.field, label);
      if (std::find(ranked.begin(), ranked.end(), key) == ranked.end()) ranked.push_back(std::move(key));
    }
    total += ap_at_5(ranked, truth).value;
  }
  return total / static_cast<double>(instances.size());
}

double accuracy(const schema::Schema& schema, std::span<const EvalInstance> instances) {
  require_family(instances, {Family::Categorical, Family::Boolean}, "accuracy");
  if (instances.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& inst : instances) {
    if (!inst.prediction) continue;
    if (inst.field->family == Family::Boolean) {
      const auto* pred = std::get_if<schema::BoolVal>(&*inst.prediction);
      if (pred && pred->value == std::get<schema::BoolVal>(inst.truth).value) ++correct;
      continue;
    }
    const auto* pred = std::get_if<schema::LabelVal>(&*inst.prediction);
    if (!pred) continue;
    const auto truth = schema.canonicalize_label(*inst.field, std::get<schema::LabelVal>(inst.truth).label);
    const auto guess = schema.canonicalize_label(*inst.field, pred->label);
    if (truth && guess && *truth == *guess) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(instances.size());
}

MetricReport evaluate(const schema::Schema& schema, std::span<const EvalInstance> instances) {
  std::map<std::string, std::vector<EvalInstance>> by_field;
  for (const auto& inst : instances) {
    if (!inst.field) throw Error(ErrorKind::InvalidArgument, "instance without a field");
    by_field[inst.field->name].push_back(inst);
  }

  MetricReport report;
  for (const auto& field : schema.fields()) {
    FieldMetric m{field.name, field.display_name, field.group, metric_name(field.family), {}, 0, 0};
    const auto it = by_field.find(field.name);
    const std::span<const EvalInstance> rows =
        it == by_field.end() ? std::span<const EvalInstance>{} : std::span<const EvalInstance>(it->second);
    switch (field.family) {
      case Family::Interval:
        m.n = rows.size();
        if (!rows.empty()) m.value = interval_coverage_rate(rows);
        break;
      case Family::Optimum: {
        const auto r = rmse_optimum(rows);
        m.value = r.value;
        m.n = r.n;
        m.failures = r.failures;
        break;
      }
      case Family::MultiLabel:
        m.n = rows.size();
        if (!rows.empty()) m.value = mean_ap_at_5(schema, rows);
        break;
      case Family::Categorical:
      case Family::Boolean:
        m.n = rows.size();
        if (!rows.empty()) m.value = accuracy(schema, rows);
        break;
    }
    if (field.family != Family::Optimum) {
      for (const auto& row : rows) {
        if (!row.prediction) ++m.failures;
      }
    }
    report.per_field.push_back(std::move(m));
  }

  for (auto group : {schema::Group::PhysiologicalBoundary, schema::Group::PhysiologicalOptimum,
                     schema::Group::Metabolism, schema::Group::CategoricalPhysiology,
                     schema::Group::Morphology}) {
    GroupMetric g{group, {}, {}, 0};
    double sum = 0.0;
    for (const auto& m : report.per_field) {
      if (m.group != group) continue;
      g.metric = m.metric;
      if (m.value) {
        sum += *m.value;
        ++g.fields;
      }
    }
    if (g.fields > 0) g.mean = sum / static_cast<double>(g.fields);
    report.per_group.push_back(g);
  }
  return report;
}

Json MetricReport::to_json() const {
  Json doc = Json::object();
  Json fields = Json::array();
  for (const auto& m : per_field) {
    Json row = Json::object();
    row["field"] = m.field;
    row["group"] = schema::to_string(m.group);
    row["metric"] = m.metric;
    row["value"] = m.value ? Json(*m.value) : Json(nullptr);
    row["n"] = m.n;
    row["failures"] = m.failures;
    fields.push_back(std::move(row));
  }
  Json groups = Json::array();
  for (const auto& g : per_group) {
    Json row = Json::object();
    row["group"] = schema::to_string(g.group);
    row["metric"] = g.metric;
    row["mean"] = g.mean ? Json(*g.mean) : Json(nullptr);
    row["fields"] = g.fields;
    groups.push_back(std::move(row));
  }
  doc["per_field"] = std::move(fields);
  doc["per_group"] = std::move(groups);
  return doc;
}

std::string MetricReport::to_table() const {
  const auto fmt_value = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", *v);
    return std::string(buf);
  };
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %-28s %-9s %8s %6s %8s\n", "Tasks", "Field", "Metric",
                "Value", "n", "failed");
  out += line;
  out += std::string(88, '-') + "\n";
  std::optional<schema::Group> current;
  for (const auto& m : per_field) {
    const char* label = "";
    if (!current || *current != m.group) {
      if (current) out += "\n";
      current = m.group;
      label = schema::to_string(m.group);
    }
    std::snprintf(line, sizeof(line), "%-24s %-28s %-9s %8s %6zu %8zu\n", label,
                  m.display_name.c_str(), m.metric.c_str(), fmt_value(m.value).c_str(), m.n,
                  m.failures);
    out += line;
  }
  out += std::string(88, '-') + "\n";
  for (const auto& g : per_group) {
    std::snprintf(line, sizeof(line), "%-24s %-28s %-9s %8s\n", schema::to_string(g.group),
                  "(group mean)", g.metric.c_str(), fmt_value(g.mean).c_str());
    out += line;
  }
  return out;
}

std::vector<EvalInstance> load_instances(const schema::Schema& schema, const std::string& dataset_text,
                                         const std::string& predictions_text) {
  using Key = std::pair<std::string, std::string>;
  const auto key_of = [&](const Json& doc, const std::string& where) -> Key {
    if (!doc.is_object() || !doc.contains("strain_id") || !doc["strain_id"].is_string() ||
        !doc.contains("field") || !doc["field"].is_string()) {
      throw Error(ErrorKind::Schema, where + ": expected string \"strain_id\" and \"field\"");
    }
    const auto field = doc["field"].get<std::string>();
    if (!schema.find(field)) throw Error(ErrorKind::Schema, where + ": unknown field " + field);
    return {doc["strain_id"].get<std::string>(), field};
  };

  std::map<Key, std::optional<schema::AnswerValue>> predictions;
  for (const auto& [line, doc] : parse_jsonl(predictions_text, "predictions file")) {
    const auto where = "predictions file: line " + std::to_string(line);
    const auto key = key_of(doc, where);
    const auto& field = schema.field(key.second);
    std::optional<schema::AnswerValue> value;
    if (doc.contains("answer_text")) {
      if (!doc["answer_text"].is_string()) throw Error(ErrorKind::Schema, where + ": answer_text must be a string");
      value = schema.parse_final_answer(doc["answer_text"].get<std::string>(), field).value;
    } else if (doc.contains("prediction")) {
      if (!doc["prediction"].is_null()) value = schema.value_from_json(field, doc["prediction"]).value;
    } else {
      throw Error(ErrorKind::Schema, where + ": expected \"prediction\" or \"answer_text\"");
    }
    if (!predictions.emplace(key, std::move(value)).second) {
      throw Error(ErrorKind::DuplicateId, where + ": duplicate prediction for " + key.first + "/" + key.second);
    }
  }

  std::vector<EvalInstance> out;
  std::set<Key> seen;
  for (const auto& [line, doc] : parse_jsonl(dataset_text, "dataset file")) {
    const auto where = "dataset file: line " + std::to_string(line);
    const auto key = key_of(doc, where);
    if (!seen.insert(key).second) {
      throw Error(ErrorKind::DuplicateId, where + ": duplicate instance " + key.first + "/" + key.second);
    }
    const auto& field = schema.field(key.second);
    if (!doc.contains("truth")) throw Error(ErrorKind::Schema, where + ": missing truth");
    auto truth = schema.value_from_json(field, doc["truth"]);
    if (!truth.verdict.valid()) {
      throw Error(ErrorKind::Schema, where + ": invalid truth (" + schema::to_string(*truth.verdict.failure) + ")");
    }
    EvalInstance inst{key.first, &field, std::move(*truth.value), std::nullopt};
    if (const auto it = predictions.find(key); it != predictions.end()) inst.prediction = it->second;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace boundrl::metrics
