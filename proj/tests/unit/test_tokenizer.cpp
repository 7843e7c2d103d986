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

#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/schema.hpp"
#include "core/tokenizer.hpp"

using boundrl::Error;
using boundrl::Rng;
namespace schema = boundrl::schema;
namespace tok = boundrl::tok;

namespace {

const schema::Schema& S() { return schema::Schema::standard(); }

}  // namespace

TEST_CASE("default task vocabulary has 32 atoms with reserved ids") {
  const auto t = tok::Tokenizer::for_field(S().field("gram_stain"));
  CHECK(t.vocab_size() == 32);
  CHECK(t.atom(tok::kToolOpen) == "<tool_call>");
  CHECK(t.atom(tok::kToolClose) == "</tool_call>");
  CHECK(t.atom(tok::kGene) == "<gene>");
  CHECK(t.id_of("negative") >= 0);
  CHECK(t.id_of("nope") == -1);
  CHECK_THROWS_AS(t.atom(32), Error);
  CHECK_THROWS_AS(t.atom(-1), Error);
}

TEST_CASE("strict answers and tool calls round-trip for every field") {
  Rng rng(4);
  for (const auto& f : S().fields()) {
    CAPTURE(f.name);
    const auto t = tok::Tokenizer::for_field(f);
    std::vector<schema::AnswerValue> values;
    switch (f.family) {
      case schema::Family::Interval:
      case schema::Family::Optimum:
        values.push_back(schema::IntervalVal{5.5, 37.0});
        values.push_back(schema::IntervalVal{-2.0, 10.25});
        break;
      case schema::Family::Categorical:
        for (const auto& l : f.vocabulary) values.push_back(schema::LabelVal{l});
        break;
      case schema::Family::Boolean:
        values.push_back(schema::BoolVal{true});
        values.push_back(schema::BoolVal{false});
        break;
      case schema::Family::MultiLabel:
        values.push_back(schema::make_ranked(S(), f, {f.vocabulary[0], f.vocabulary.back()}));
        break;
    }
    for (const auto& v : values) {
      const auto text = S().serialize_answer(f, v);
      const auto ids = t.encode(text);
      for (int id : ids) CHECK(id != tok::kUnk);
      CHECK(t.decode(ids) == text);
      const auto with_eos = t.encode_answer(text);
      CHECK(with_eos.back() == tok::kEos);
      CHECK(t.decode(with_eos) == text);
      CHECK(S().parse_final_answer(t.decode(with_eos), f).verdict.valid());
    }
    CHECK(t.decode(t.encode_rag_call()) == R"(<tool_call>{"name": "rag_tool", "arguments": {}}</tool_call>)");
    for (int id = 1; id <= 18; ++id) {
      CHECK(t.decode(t.encode_gem_call(id)) ==
            "<tool_call>{\"name\": \"gem_tool\", \"arguments\": {\"config_id\": " + std::to_string(id) + "}}</tool_call>");
    }
  }
}

TEST_CASE("unknown bytes become unk and specials render empty") {
  const auto t = tok::Tokenizer::for_field(S().field("gram_stain"));
  const auto ids = t.encode("q9");
  REQUIRE(ids.size() == 2);
  CHECK(ids[0] == tok::kUnk);
  CHECK(t.atom(ids[1]) == "9");
  CHECK(t.decode(std::vector<int>{tok::kBos, tok::kPad, tok::kEos, tok::kUnk}).empty());
  CHECK(t.decode(std::vector<int>{tok::kGene}) == "<gene>");
  CHECK(t.encode("") .empty());
}

TEST_CASE("decode then encode is the identity on unk-free streams") {
  Rng rng(12);
  const auto t = tok::Tokenizer::for_field(S().field("gram_stain"));
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> ids;
    const std::size_t n = 1 + rng.below(10);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(tok::kToolOpen + static_cast<int>(rng.below(t.vocab_size() - tok::kToolOpen)));
    const auto text = t.decode(ids);
    CHECK(t.decode(t.encode(text)) == text);
  }
}
