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


#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/rewards.hpp"
#include "core/rng.hpp"

using boundrl::Error;
using boundrl::Json;
using boundrl::Rng;
namespace rw = boundrl::rewards;
namespace schema = boundrl::schema;

namespace {

const schema::Schema& S() { return schema::Schema::standard(); }

double corr(const char* field, const schema::AnswerValue& pred, const schema::AnswerValue& truth) {
  return rw::correctness_reward(S(), S().field(field), pred, truth);
}

}  // namespace

TEST_CASE("json format reward") {
  const auto& f = S().field("gram_stain");
  CHECK(rw::json_format_reward(S().parse_final_answer(R"({"gram_stain": "negative"})", f).verdict) == 1.0);
  const auto fenced = S().parse_final_answer("```json\n{\"gram_stain\": \"negative\"}\n```", f).verdict;
  CHECK(fenced.failure == schema::FailureReason::MarkdownFence);
  CHECK(rw::json_format_reward(fenced) == -1.0);
  const auto missing = S().parse_final_answer(R"({})", f).verdict;
  CHECK(missing.failure == schema::FailureReason::MissingTargetField);
  CHECK(rw::json_format_reward(missing) == -1.0);
}

TEST_CASE("tool use reward piecewise table") {
  const rw::ToolSchedule sched;
  for (double p : {0.0, 0.3, 0.5, 1.0}) CHECK(rw::tool_use_reward(0, p, sched) == -1.0);
  CHECK(sched.target(0.0) == 4.0);
  CHECK(sched.target(0.5) == 3.0);
  CHECK(sched.target(1.0) == 2.0);
  CHECK(rw::tool_use_reward(4, 0.0, sched) == 1.0);
  CHECK(rw::tool_use_reward(2, 1.0, sched) == 1.0);
  CHECK(rw::tool_use_reward(6, 1.0, sched) == 0.25);
  for (int c = 1; c <= 4; ++c) {
    CHECK(std::abs(rw::tool_use_reward(c, 0.0, sched) - (0.25 + 0.75 * std::sqrt(c / 4.0))) <= 1e-12);
  }
  CHECK(rw::tool_use_reward(5, 0.0, sched) == doctest::Approx(0.875).epsilon(1e-15));
  for (int c = 10; c < 40; ++c) CHECK(rw::tool_use_reward(c, 0.0, sched) == 0.25);
}

TEST_CASE("tool use reward continuity and dominance over zero calls") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    rw::ToolSchedule sched{0.5 + rng.uniform() * 8.0, 0.5 + rng.uniform() * 8.0};
    const double p = rng.uniform();
    const double t = sched.target(p);
    const double lower = 0.25 + 0.75 * std::sqrt(t / t);
    const double upper = std::max(0.25, 1.0 - 0.5 * (t - t) / t);
    CHECK(lower == 1.0);
    CHECK(upper == 1.0);
    const double zero = rw::tool_use_reward(0, p, sched);
    for (int c = 1; c <= 12; ++c) CHECK(rw::tool_use_reward(c, p, sched) > zero);
  }
}

TEST_CASE("no-tool penalty") {
  CHECK(rw::no_tool_penalty(0, -1.0) == -1.0);
  CHECK(rw::no_tool_penalty(0, 0.0) == -1.0);
  CHECK(rw::no_tool_penalty(0, 1.0) == 0.0);
  CHECK(rw::no_tool_penalty(3, -1.0) == 0.0);
}

TEST_CASE("correctness reward examples") {
  CHECK(corr("gram_stain", schema::LabelVal{"negative"}, schema::LabelVal{"negative"}) == 1.0);
  CHECK(corr("gram_stain", schema::LabelVal{"Gram-negative"}, schema::LabelVal{"negative"}) == 1.0);
  CHECK(corr("gram_stain", schema::LabelVal{"positive"}, schema::LabelVal{"negative"}) == -1.0);
  CHECK(corr("motility", schema::BoolVal{true}, schema::BoolVal{true}) == 1.0);
  CHECK(corr("motility", schema::BoolVal{false}, schema::BoolVal{true}) == -1.0);
  const auto& cs = S().field("carbon_source");
  const auto five = schema::make_ranked(S(), cs, {cs.vocabulary[0], cs.vocabulary[1], cs.vocabulary[2],
                                                 cs.vocabulary[3], cs.vocabulary[4]});
  auto shuffled = five;
  std::reverse(shuffled.labels.begin(), shuffled.labels.end());
  CHECK(corr("carbon_source", shuffled, five) == 1.0);
  CHECK(std::abs(corr("pH_range", schema::IntervalVal{5, 9}, schema::IntervalVal{6, 8}) - (1.0 - 0.25 * 2.0 / 7.0)) <=
        1e-12);
  CHECK(rw::correctness_reward(S(), S().field("pH_range"), std::nullopt, schema::IntervalVal{6, 8}) == -1.0);
  CHECK(corr("pH_range", schema::LabelVal{"x"}, schema::IntervalVal{6, 8}) == -1.0);
  CHECK(corr("pH_range", schema::IntervalVal{9, 5}, schema::IntervalVal{6, 8}) == -1.0);
}

TEST_CASE("interval, optimum and multilabel properties") {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const double lo = rng.uniform() * 10.0;
    const schema::IntervalVal truth{lo, lo + 0.1 + rng.uniform() * 4.0};
    CHECK(corr("pH_range", truth, truth) == 1.0);
    const double gap = 0.01 + rng.uniform() * 3.0;
    const double width = rng.uniform() * 5.0;
    CHECK(corr("pH_range", schema::IntervalVal{truth.upper + gap, truth.upper + gap + width}, truth) == -1.0);
    const double r = corr("pH_range", schema::IntervalVal{lo - rng.uniform(), lo + rng.uniform() * 12.0}, truth);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);

    const schema::IntervalVal opt{lo, lo + rng.uniform()};
    CHECK(corr("pH_opt", schema::IntervalVal{opt.midpoint(), opt.midpoint()}, opt) == 1.0);
    const double far = opt.midpoint() + 2.0 + rng.uniform() * 5.0;
    CHECK(corr("pH_opt", schema::IntervalVal{far, far}, opt) == -1.0);
  }
  CHECK(corr("pH_range", schema::IntervalVal{6, 6}, schema::IntervalVal{6, 6}) == 1.0);
  CHECK(corr("pH_range", schema::IntervalVal{5, 7}, schema::IntervalVal{6, 6}) == 1.0);
  CHECK(corr("pH_range", schema::IntervalVal{6.5, 7}, schema::IntervalVal{6, 6}) == -1.0);

  const auto& cs = S().field("carbon_source");
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> truth_labels;
    std::vector<std::string> pred_labels;
    for (const auto& l : cs.vocabulary) {
      if (rng.bernoulli(0.3) && truth_labels.size() < 5) truth_labels.push_back(l);
      else if (rng.bernoulli(0.3)) pred_labels.push_back(l);
    }
    if (truth_labels.empty()) continue;
    const auto truth = schema::make_ranked(S(), cs, truth_labels);
    CHECK(corr("carbon_source", truth, truth) == 1.0);
    if (!pred_labels.empty() && truth_labels.size() < 5) {
      CHECK(corr("carbon_source", schema::make_ranked(S(), cs, pred_labels), truth) == -1.0);
      std::vector<std::string> mixed = truth_labels;
      mixed.push_back(pred_labels.front());
      CHECK(corr("carbon_source", schema::make_ranked(S(), cs, mixed), truth) < 1.0);
    }
  }
}

TEST_CASE("composite reward grid and linearity") {
  const double grid[] = {-1.0, -0.25, 0.5, 1.0};
  for (double a : grid) {
    for (double b : grid) {
      for (double c : grid) {
        for (double d : grid) {
          const auto out = rw::composite_reward({a, b, c, d});
          CHECK(std::abs(out.composite - (0.5 * a + b + c + d)) <= 1e-12);
        }
      }
    }
  }
  CHECK(rw::composite_reward({1, 1, 1, 0}).composite == 2.5);
  CHECK(rw::composite_reward({0, 0, 0, 0}).composite == 0.0);
  CHECK(rw::composite_reward({-1, -1, -1, -1}).composite == -3.5);
  rw::RewardWeights w;
  w.external = 0.75;
  w.tool = 2.0;
  CHECK(rw::composite_reward({0, 0, 1, 0}, w).composite == 2.75);
  const auto j = rw::composite_reward({1, 0, 0, 0}).to_json();
  CHECK(j["weights"]["w_json"] == 0.5);
}

TEST_CASE("reward config validation and round trip") {
  const rw::RewardConfig def;
  CHECK(def.weights.json == 0.5);
  CHECK(def.weights.corr == 1.0);
  CHECK(def.schedule.t_init == 4.0);
  CHECK(def.correctness.interval_scale.at("pH_range") == 7.0);
  CHECK(def.correctness.optimum_scale.at("growth_temperature_opt_C") == 10.0);
  const auto back = rw::RewardConfig::from_json(def.to_json());
  CHECK(back.to_json().dump() == def.to_json().dump());
  CHECK_THROWS_AS(rw::RewardConfig::from_json(Json{{"w_attn", 0.1}}), Error);
  CHECK_THROWS_AS(rw::RewardConfig::from_json(Json{{"t_init", 0.0}}), Error);
  CHECK_THROWS_AS(rw::RewardConfig::from_json(Json{{"bogus", 1}}), Error);
  CHECK_THROWS_AS(rw::RewardConfig::from_json(Json{{"w_json", "x"}}), Error);
  CHECK_THROWS_AS(rw::RewardConfig::from_json(Json{{"interval_scale", {{"pH_range", -1}}}}), Error);
  CHECK(rw::RewardConfig::from_json(Json{{"w_tool", 2.0}}).weights.tool == 2.0);
}
