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

#include <string>
#include <string_view>
#include <vector>

#include "core/schema.hpp"

namespace boundrl::tok {

// Reserved ids shared by every tokenizer built here.
enum Special : int { kPad = 0, kBos = 1, kEos = 2, kUnk = 3, kGene = 4, kToolOpen = 5, kToolClose = 6 };

inline constexpr std::string_view kToolOpenText = "<tool_call>";
inline constexpr std::string_view kToolCloseText = "</tool_call>";

// Greedy longest-match tokenizer over a fixed list of string atoms. Bytes
// that start no atom become <unk>.
class Tokenizer {
 public:
  // Atoms for one target field: specials, tool markers, tool-call bodies,
  // digits, the answer frame, the field's labels and JSON punctuation.
  static Tokenizer for_field(const schema::TraitField& field);

  std::size_t vocab_size() const { return atoms_.size(); }
  const std::string& atom(int id) const;

  std::vector<int> encode(std::string_view text) const;
  // Specials other than <gene> and the tool markers render as "".
  std::string decode(const std::vector<int>& ids) const;
  std::string decode(std::span<const int> ids) const;

  int id_of(std::string_view atom) const;  // -1 if absent

  // Token sequence of a complete tool call, markers included.
  std::vector<int> encode_rag_call() const;
  std::vector<int> encode_gem_call(int config_id) const;
  // Tokens of the strict answer text followed by <eos>.
  std::vector<int> encode_answer(std::string_view answer_text) const;

 private:
  explicit Tokenizer(std::vector<std::string> atoms);

  std::vector<std::string> atoms_;
  std::vector<bool> renders_;
};

}  // namespace boundrl::tok
