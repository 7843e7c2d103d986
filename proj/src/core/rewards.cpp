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

#include "core/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/error.hpp"

namespace boundrl::rewards {

using schema::Family;

namespace {

double scale_for(const std::map<std::string, double, std::less<>>& scales,
                 const schema::TraitField& field) {
  const auto it = scales.find(field.name);
  if (it == scales.end()) {
    throw Error(ErrorKind::InvalidArgument, "no reward scale configured for " + field.name);
  }
  return it->second;
}

double interval_reward(const schema::IntervalVal& pred, const schema::IntervalVal& truth,
                       double compactness, double scale) {
  const double truth_len = truth.upper - truth.lower;
  if (truth_len <= 0.0) {
    return (pred.lower <= truth.lower && pred.upper >= truth.upper) ? 1.0 : -1.0;
  }
  const double overlap =
      std::max(0.0, std::min(pred.upper, truth.upper) - std::max(pred.lower, truth.lower));
  const double excess = (pred.upper - pred.lower) - overlap;
  const double r = 2.0 * overlap / truth_len - 1.0 - compactness * excess / scale;
  return std::clamp(r, -1.0, 1.0);
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, std::string("reward config: ") + name + " must be finite");
  }
}

}  // namespace

void RewardConfig::validate() const {
  require_finite(weights.json, "w_json");
  require_finite(weights.corr, "w_corr");
  require_finite(weights.tool, "w_tool");
  require_finite(weights.nt, "w_nt");
  require_finite(weights.external, "external");
  if (weights.attention != 0.0) {
    throw Error(ErrorKind::InvalidArgument, "reward config: w_attn must be 0 (attention shaping is not implemented)");
  }
  if (!(schedule.t_init > 0.0) || !(schedule.t_final > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "reward config: t_init and t_final must be positive");
  }
  require_finite(correctness.compactness, "compactness");
  for (const auto* scales : {&correctness.interval_scale, &correctness.optimum_scale}) {
    for (const auto& [name, s] : *scales) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw Error(ErrorKind::InvalidArgument, "reward config: scale for " + name + " must be positive");
      }
    }
  }
}

Json RewardConfig::to_json() const {
  Json doc = Json::object();
  doc["w_json"] = weights.json;
  doc["w_corr"] = weights.corr;
  doc["w_tool"] = weights.tool;
  doc["w_nt"] = weights.nt;
  doc["external"] = weights.external;
  doc["w_attn"] = weights.attention;
  doc["t_init"] = schedule.t_init;
  doc["t_final"] = schedule.t_final;
  doc["compactness"] = correctness.compactness;
  Json interval = Json::object();
  for (const auto& [k, v] : correctness.interval_scale) interval[k] = v;
  Json optimum = Json::object();
  for (const auto& [k, v] : correctness.optimum_scale) optimum[k] = v;
  doc["interval_scale"] = std::move(interval);
  doc["optimum_scale"] = std::move(optimum);
  return doc;
}

RewardConfig RewardConfig::from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "reward config must be an object");
  RewardConfig cfg;
  const auto number = [](const Json& v, const std::string& key) {
    if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, "reward config: " + key + " must be a number");
    return v.get<double>();
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "w_json") cfg.weights.json = number(value, key);
    else if (key == "w_corr") cfg.weights.corr = number(value, key);
    else if (key == "w_tool") cfg.weights.tool = number(value, key);
    else if (key == "w_nt") cfg.weights.nt = number(value, key);
    else if (key == "external") cfg.weights.external = number(value, key);
    else if (key == "w_attn") cfg.weights.attention = number(value, key);
    else if (key == "t_init") cfg.schedule.t_init = number(value, key);
    else if (key == "t_final") cfg.schedule.t_final = number(value, key);
    else if (key == "compactness") cfg.correctness.compactness = number(value, key);
    else if (key == "interval_scale" || key == "optimum_scale") {
      auto& target = key == "interval_scale" ? cfg.correctness.interval_scale : cfg.correctness.optimum_scale;
      if (!value.is_object()) throw Error(ErrorKind::InvalidArgument, "reward config: " + key + " must be an object");
      for (const auto& [field, s] : value.items()) target[field] = number(s, key + "." + field);
    } else {
      throw Error(ErrorKind::InvalidArgument, "reward config: unknown key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

Json RewardBreakdown::to_json() const {
  Json doc = Json::object();
  doc["r_json"] = r_json;
  doc["r_corr"] = r_corr;
  doc["r_tool"] = r_tool;
  doc["r_nt"] = r_nt;
  doc["external"] = external;
  doc["composite"] = composite;
  Json w = Json::object();
  w["w_json"] = weights.json;
  w["w_corr"] = weights.corr;
  w["w_tool"] = weights.tool;
  w["w_nt"] = weights.nt;
  doc["weights"] = std::move(w);
  return doc;
}

double json_format_reward(const schema::StrictVerdict& verdict) {
  return verdict.valid() ? 1.0 : -1.0;
}

double micro_f1_at_5(const schema::Schema& schema, const schema::TraitField& field,
                     const schema::RankedLabels& prediction, const schema::RankedLabels& truth) {
  std::set<std::string> predicted;
  for (const auto& label : prediction.labels) {
    if (predicted.size() == 5) break;
    predicted.insert(schema.comparison_key(field, label));
  }
  std::set<std::string> expected;
  for (const auto& label : truth.labels) expected.insert(schema.comparison_key(field, label));
  if (predicted.empty() && expected.empty()) return 1.0;
  std::size_t tp = 0;
  for (const auto& p : predicted) tp += expected.count(p);
  return 2.0 * static_cast<double>(tp) / static_cast<double>(predicted.size() + expected.size());
}

double correctness_reward(const schema::Schema& schema, const schema::TraitField& field,
                          const std::optional<schema::AnswerValue>& prediction,
                          const schema::AnswerValue& truth, const CorrectnessConfig& cfg) {
  if (!prediction || !schema.validate_answer_schema(field, *prediction).valid()) return -1.0;
  switch (field.family) {
    case Family::Interval:
      return interval_reward(std::get<schema::IntervalVal>(*prediction),
                             std::get<schema::IntervalVal>(truth), cfg.compactness,
                             scale_for(cfg.interval_scale, field));
    case Family::Optimum: {
      const double err = std::abs(std::get<schema::IntervalVal>(*prediction).midpoint() -
                                  std::get<schema::IntervalVal>(truth).midpoint());
      return 1.0 - 2.0 * std::min(err / scale_for(cfg.optimum_scale, field), 1.0);
    }
    case Family::Categorical: {
      const auto guess = schema.canonicalize_label(field, std::get<schema::LabelVal>(*prediction).label);
      const auto want = schema.canonicalize_label(field, std::get<schema::LabelVal>(truth).label);
      return guess && want && *guess == *want ? 1.0 : -1.0;
    }
    case Family::Boolean:
      return std::get<schema::BoolVal>(*prediction).value == std::get<schema::BoolVal>(truth).value
                 ? 1.0
                 : -1.0;
    case Family::MultiLabel:
      return 2.0 * micro_f1_at_5(schema, field, std::get<schema::RankedLabels>(*prediction),
                                 std::get<schema::RankedLabels>(truth)) -
             1.0;
  }
  return -1.0;
}

double tool_use_reward(int calls, double progress, const ToolSchedule& schedule) {
  const double t = schedule.target(progress);
  const double c = static_cast<double>(calls);
  if (calls <= 0) return -1.0;
  if (c <= t) return 0.25 + 0.75 * std::sqrt(c / t);
  return std::max(0.25, 1.0 - 0.5 * (c - t) / t);
}

double no_tool_penalty(int calls, double r_corr) {
  return (calls == 0 && r_corr <= 0.0) ? -1.0 : 0.0;
}

RewardBreakdown composite_reward(const RewardInputs& parts, const RewardWeights& weights) {
  RewardBreakdown out;
  out.r_json = parts.r_json;
  out.r_corr = parts.r_corr;
  out.r_tool = parts.r_tool;
  out.r_nt = parts.r_nt;
  out.external = weights.external;
  out.weights = weights;
  out.composite = weights.json * parts.r_json + weights.corr * parts.r_corr +
                  weights.tool * parts.r_tool + weights.nt * parts.r_nt + weights.external;
  return out;
}

}  // namespace boundrl::rewards
