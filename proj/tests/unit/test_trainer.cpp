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

#include <atomic>
#include <cmath>

#include "core/error.hpp"
#include "core/trainer.hpp"

using boundrl::Error;
using boundrl::Json;
namespace env = boundrl::env;
namespace schema = boundrl::schema;
namespace train = boundrl::train;

namespace {

const schema::Schema& S() { return schema::Schema::standard(); }

train::TrainConfig small_config() {
  train::TrainConfig cfg;
  cfg.steps = 4;
  cfg.prompts_per_step = 4;
  cfg.sft_steps = 20;
  cfg.task.train_strains = 24;
  cfg.task.eval_strains = 12;
  return cfg;
}

env::Trajectory finished(const std::string& answer, int calls) {
  env::Trajectory t;
  t.field = "gram_stain";
  t.final_answer_text = answer;
  for (int i = 0; i < calls; ++i) t.tool_calls.push_back({i + 1, "rag_tool", Json::object(), Json::object(), false});
  return t;
}

}  // namespace

TEST_CASE("trajectory scoring") {
  const boundrl::rewards::RewardConfig cfg;
  auto r = train::score_trajectory_reward(S(), finished(R"({"gram_stain": "negative"})", 4), "negative", 0.0, cfg);
  CHECK(r.verdict.valid());
  CHECK(r.breakdown.composite == 2.5);
  r = train::score_trajectory_reward(S(), finished(R"({"gram_stain": "positive"})", 0), "negative", 0.0, cfg);
  CHECK(r.breakdown.composite == doctest::Approx(0.5 - 1.0 - 1.0 - 1.0).epsilon(1e-15));
  r = train::score_trajectory_reward(S(), finished("```json\n{\"gram_stain\": \"negative\"}\n```", 2), "negative", 1.0, cfg);
  CHECK(r.verdict.failure == schema::FailureReason::MarkdownFence);
  CHECK(r.breakdown.r_json == -1.0);
  CHECK(r.breakdown.r_corr == -1.0);
  CHECK(r.breakdown.r_tool == 1.0);
  auto none = finished("", 1);
  none.final_answer_text.reset();
  r = train::score_trajectory_reward(S(), none, "negative", 0.0, cfg);
  CHECK(r.verdict.failure == schema::FailureReason::NotJson);
  CHECK_THROWS_AS(train::score_trajectory_reward(S(), none, 3, 0.0, cfg), Error);
}

TEST_CASE("config round trip and guards") {
  const train::TrainConfig def;
  CHECK(def.advantage.group_size == 4);
  CHECK(def.advantage.w_gene == 0.5);
  CHECK(def.prompts_per_step * def.advantage.group_size == 64);
  CHECK(def.lr == 1e-2);
  const auto back = train::TrainConfig::from_json(def.to_json());
  CHECK(back.to_json().dump() == def.to_json().dump());
  CHECK_THROWS_AS(train::TrainConfig::from_json(Json::parse(R"({"advantage": {"w_attn": 0.5}})")), Error);
  CHECK_THROWS_AS(train::TrainConfig::from_json(Json::parse(R"({"reward": {"w_attn": 0.5}})")), Error);
  CHECK_THROWS_AS(train::TrainConfig::from_json(Json::parse(R"({"stepz": 3})")), Error);
  CHECK_THROWS_AS(train::TrainConfig::from_json(Json::parse(R"({"seed": -1})")), Error);
  const auto gn = train::TrainConfig::from_json(Json::parse(R"({"advantage": {"tool_token_mode": "group_normalized"}})"));
  CHECK(gn.advantage.tool_token_mode == boundrl::grpo::ToolTokenMode::GroupNormalized);
  auto bad = def;
  bad.lr = -1.0;
  CHECK_THROWS_AS(bad.validate(S()), Error);
}

TEST_CASE("zero learning rate leaves parameters byte-identical") {
  auto cfg = small_config();
  cfg.lr = 0.0;
  cfg.steps = 0;
  const auto base = train::train_toy(cfg);
  for (int steps : {1, 3}) {
    cfg.steps = steps;
    const auto run = train::train_toy(cfg);
    CHECK(run.params == base.params);
    CHECK(run.params.to_json().dump() == base.params.to_json().dump());
  }
}

TEST_CASE("seed replay and schedule progress") {
  const auto cfg = small_config();
  std::vector<std::string> seen;
  const auto a = train::train_toy(cfg, [&](const train::StepReport& s) { seen.push_back(s.to_json().dump()); });
  const auto b = train::train_toy(cfg, {}, 2);
  REQUIRE(a.steps.size() == 4);
  REQUIRE(seen.size() == 4);
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].to_json().dump() == b.steps[i].to_json().dump());
    CHECK(seen[i] == a.steps[i].to_json().dump());
    CHECK(a.steps[i].progress == doctest::Approx(static_cast<double>(i) / 3.0).epsilon(1e-15));
  }
  CHECK(a.params == b.params);
  CHECK(a.summary_json().dump() == b.summary_json().dump());
  auto other = cfg;
  other.seed = 2;
  CHECK(train::train_toy(other).steps[0].to_json().dump() != a.steps[0].to_json().dump());
}

TEST_CASE("final window delta is token weighted") {
  train::TrainReport r;
  for (int i = 0; i < 10; ++i) {
    train::StepReport s;
    s.step = i;
    s.gene_delta_mean = i;
    s.gene_delta_tokens = i < 8 ? 5 : static_cast<std::size_t>(i);
    r.steps.push_back(s);
  }
  CHECK(r.final_window_delta(0.2) == doctest::Approx((8.0 * 8 + 9.0 * 9) / 17.0).epsilon(1e-15));
  CHECK(r.final_window_delta(0.25) == doctest::Approx((7.0 * 5 + 8.0 * 8 + 9.0 * 9) / 22.0).epsilon(1e-15));
}

TEST_CASE("parallel_for visits every index once") {
  for (int jobs : {1, 2, 5}) {
    std::vector<std::atomic<int>> hits(37);
    train::parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
}
