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

#include <boundrl/boundrl.h>

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

using Json = nlohmann::ordered_json;

namespace {

// Owns one C API output string.
struct Out {
  char* s = nullptr;
  ~Out() { br_string_free(s); }
  std::string str() const { return s ? s : ""; }
  Json json() const { return Json::parse(str()); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kStore =
    "{\"strain_id\": \"S1\", \"embedding\": [1, 0, 0], \"phenotypes\": {\"gram_stain\": \"negative\"}}\n"
    "{\"strain_id\": \"S2\", \"embedding\": [0.9, 0.1, 0], \"phenotypes\": {\"gram_stain\": \"positive\", \"motility\": true}}\n"
    "{\"strain_id\": \"S3\", \"embedding\": [0, 1, 0], \"phenotypes\": {\"gram_stain\": \"variable\"}}\n"
    "{\"strain_id\": \"S4\", \"embedding\": [0, 0, 1], \"phenotypes\": {}}\n";

}  // namespace

TEST_CASE("version, status names and last error") {
  CHECK(std::string(br_version()).size() > 0);
  CHECK(std::string(br_status_name(BR_OK)) == "ok");
  CHECK(std::string(br_status_name(BR_ERR_DATA)) == "data");
  Out o;
  CHECK(br_config_show(R"({"bogus": 1})", &o.s) == BR_ERR_INVALID_ARGUMENT);
  CHECK(o.s == nullptr);
  CHECK(std::string(br_last_error()).find("bogus") != std::string::npos);
  CHECK(br_config_show(nullptr, nullptr) == BR_ERR_INVALID_ARGUMENT);
}

TEST_CASE("sha256 test vector") {
  Out o;
  REQUIRE(br_sha256_hex("abc", 3, &o.s) == BR_OK);
  CHECK(o.str() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  Out e;
  REQUIRE(br_sha256_hex("", 0, &e.s) == BR_OK);
  CHECK(e.str() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("config show") {
  Out def;
  REQUIRE(br_config_show(nullptr, &def.s) == BR_OK);
  const auto d = def.json();
  CHECK(d["advantage"]["w_gene"] == 0.5);
  CHECK(d["reward"]["w_json"] == 0.5);
  Out merged;
  REQUIRE(br_config_show(R"({"steps": 7})", &merged.s) == BR_OK);
  CHECK(merged.json()["steps"] == 7);
  Out bad;
  CHECK(br_config_show("{not json", &bad.s) == BR_ERR_PARSE);
  CHECK(br_config_show(R"({"advantage": {"w_attn": 1}})", &bad.s) == BR_ERR_INVALID_ARGUMENT);
}

TEST_CASE("store handles and rag observations") {
  br_store* store = nullptr;
  REQUIRE(br_store_open(kStore, &store) == BR_OK);
  CHECK(br_store_size(store) == 4);
  CHECK(br_store_dimension(store) == 3);
  Out obs;
  REQUIRE(br_rag_observation(store, "S1", R"(["gram_stain"])", &obs.s) == BR_OK);
  const auto doc = Json::parse(obs.str());
  CHECK(doc["retrieved_count"] == 3);
  CHECK(doc["top_similar_records"][0]["phenotypes"]["gram_stain"] == "positive");
  CHECK(obs.str().find("\n  \"tool\": \"rag_tool\",\n") != std::string::npos);
  Out unknown;
  REQUIRE(br_rag_observation(store, "nope", nullptr, &unknown.s) == BR_OK);
  CHECK(Json::parse(unknown.str())["error"] == "unknown handle: nope");
  Out bad_fields;
  CHECK(br_rag_observation(store, "S1", R"(["no_such_field"])", &bad_fields.s) != BR_OK);
  br_store_close(store);
  br_store_close(nullptr);

  br_store* dup = nullptr;
  CHECK(br_store_open("{\"strain_id\": \"A\", \"embedding\": [1]}\n{\"strain_id\": \"A\", \"embedding\": [1]}\n", &dup) ==
        BR_ERR_DATA);
  CHECK(dup == nullptr);
  CHECK(br_store_open("{\"strain_id\": \"A\", \"embedding\": [0]}\n", &dup) == BR_ERR_DATA);
  CHECK(br_store_open("{\"strain_id\": \"A\", \"embedding\": [1]}\n{\"strain_id\": \"B\", \"embedding\": [1, 2]}\n", &dup) ==
        BR_ERR_DATA);
  CHECK(br_store_open("{oops\n", &dup) == BR_ERR_PARSE);
}

TEST_CASE("gem observations") {
  br_models* models = nullptr;
  REQUIRE(br_models_open(nullptr, &models) == BR_OK);
  for (int id = 1; id <= 18; ++id) {
    Out o;
    REQUIRE(br_gem_observation(models, id, &o.s) == BR_OK);
    const auto doc = Json::parse(o.str());
    CHECK(doc["tool"] == "gem_tool");
    CHECK(doc["configuration_id"] == id);
  }
  Out o;
  CHECK(br_gem_observation(models, 0, &o.s) == BR_ERR_INVALID_ARGUMENT);
  CHECK(br_gem_observation(models, 19, &o.s) == BR_ERR_INVALID_ARGUMENT);
  br_models_close(models);
  br_models* bad = nullptr;
  CHECK(br_models_open(R"({"models": 3})", &bad) == BR_ERR_SCHEMA);
}

TEST_CASE("answer parsing") {
  Out ok;
  REQUIRE(br_parse_answer("gram_stain", R"({"gram_stain": "Gram-negative"})", &ok.s) == BR_OK);
  auto doc = ok.json();
  CHECK(doc["valid"] == true);
  CHECK(doc["failure_reason"].is_null());
  Out fenced;
  REQUIRE(br_parse_answer("gram_stain", "```json\n{\"gram_stain\": \"negative\"}\n```", &fenced.s) == BR_OK);
  doc = fenced.json();
  CHECK(doc["valid"] == false);
  CHECK(doc["failure_reason"] == "MarkdownFence");
  CHECK(doc["best_effort"] == "negative");
  Out unknown;
  CHECK(br_parse_answer("no_field", "{}", &unknown.s) == BR_ERR_SCHEMA);
}

TEST_CASE("eval over files") {
  const std::string dataset = R"({"strain_id": "A", "field": "gram_stain", "truth": "negative"})"
                              "\n"
                              R"({"strain_id": "A", "field": "pH_range", "truth": {"lower": 6, "upper": 8}})"
                              "\n";
  const std::string preds = R"({"strain_id": "A", "field": "gram_stain", "prediction": "negative"})"
                            "\n"
                            R"({"strain_id": "A", "field": "pH_range", "prediction": {"lower": 5, "upper": 9}})"
                            "\n";
  Out report, table;
  REQUIRE(br_eval(dataset.c_str(), preds.c_str(), &report.s, &table.s) == BR_OK);
  const auto doc = report.json();
  bool saw_icr = false;
  for (const auto& f : doc["per_field"]) {
    if (f["field"] == "pH_range") {
      CHECK(f["value"] == 1.0);
      saw_icr = true;
    }
  }
  CHECK(saw_icr);
  CHECK(table.str().find("pH range") != std::string::npos);
  Out r2, t2;
  CHECK(br_eval("{bad\n", preds.c_str(), &r2.s, &t2.s) == BR_ERR_PARSE);
  CHECK(std::string(br_last_error()).find("line 1") != std::string::npos);
}

TEST_CASE("reward preview") {
  const auto golden = Json::parse(read_file(BOUNDRL_TEST_DATA "/distill_golden.jsonl").substr(
      0, read_file(BOUNDRL_TEST_DATA "/distill_golden.jsonl").find('\n')));
  const auto& bundle = golden["bundle"];
  const auto traj = bundle["candidates"][0].dump();
  const auto truth = bundle["truth"].dump();
  Out o;
  REQUIRE(br_reward(traj.c_str(), truth.c_str(), nullptr, 0.0, &o.s) == BR_OK);
  const auto doc = o.json();
  const auto& b = doc["breakdown"];
  CHECK(b["composite"].get<double>() ==
        doctest::Approx(0.5 * b["r_json"].get<double>() + b["r_corr"].get<double>() + b["r_tool"].get<double>() +
                        b["r_nt"].get<double>())
            .epsilon(1e-12));
  CHECK(doc["tool_calls"] == bundle["candidates"][0]["tool_calls"].size());
  Out missing;
  CHECK(br_reward(traj.c_str(), nullptr, nullptr, 0.0, &missing.s) == BR_ERR_SCHEMA);
  Out bad_progress;
  CHECK(br_reward(traj.c_str(), truth.c_str(), nullptr, 1.5, &bad_progress.s) == BR_ERR_INVALID_ARGUMENT);
}

TEST_CASE("toy training through the C API") {
  const char* cfg = R"({"steps": 2, "prompts_per_step": 2, "sft": {"steps": 5},
                        "task": {"train_strains": 12, "eval_strains": 6}})";
  std::vector<std::string> steps;
  const auto cb = [](const char* step, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(step); };
  Out summary, params;
  REQUIRE(br_train_toy(cfg, 1, cb, &steps, &summary.s, &params.s) == BR_OK);
  CHECK(steps.size() == 2);
  CHECK(Json::parse(steps[0])["step"] == 0);
  CHECK(summary.json().contains("final_window_delta"));
  CHECK(params.json().contains("W_g"));
  Out s2, p2;
  CHECK(br_train_toy(R"({"lr": -1})", 1, nullptr, nullptr, &s2.s, &p2.s) == BR_ERR_INVALID_ARGUMENT);
}

TEST_CASE("distill bundle through the C API") {
  const auto text = read_file(BOUNDRL_TEST_DATA "/distill_golden.jsonl");
  const auto line = Json::parse(text.substr(0, text.find('\n')));
  const auto bundle = line["bundle"].dump();
  Out a, b;
  REQUIRE(br_distill_bundle(bundle.c_str(), &a.s) == BR_OK);
  REQUIRE(br_distill_bundle(bundle.c_str(), &b.s) == BR_OK);
  CHECK(a.str() == b.str());
  const auto doc = a.json();
  Json decision = Json::object();
  decision["winner"] = doc["winner"];
  decision["decided_by"] = doc["decided_by"];
  decision["retry"] = doc["retry"];
  CHECK(decision.dump() == line["decision"].get<std::string>());
  Out bad;
  CHECK(br_distill_bundle("[]", &bad.s) == BR_ERR_INVALID_ARGUMENT);
}
