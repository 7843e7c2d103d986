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

#include "core/tokenizer.hpp"

#include <algorithm>
#include <set>

#include "core/error.hpp"

namespace boundrl::tok {

namespace {

constexpr std::string_view kRagBody = R"({"name": "rag_tool", "arguments": {}})";
constexpr std::string_view kGemPrefix = R"({"name": "gem_tool", "arguments": {"config_id": )";
constexpr std::string_view kGemSuffix = "}}";

}  // namespace

Tokenizer::Tokenizer(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
  renders_.assign(atoms_.size(), true);
  for (int id : {kPad, kBos, kEos, kUnk}) renders_[static_cast<std::size_t>(id)] = false;
  std::set<std::string> seen;
  for (const auto& a : atoms_) {
    if (a.empty() || !seen.insert(a).second) {
      throw Error(ErrorKind::InvalidArgument, "tokenizer: empty or duplicate atom '" + a + "'");
    }
  }
}

Tokenizer Tokenizer::for_field(const schema::TraitField& field) {
  std::vector<std::string> atoms = {"<pad>", "<bos>", "<eos>", "<unk>", "<gene>",
                                    std::string(kToolOpenText), std::string(kToolCloseText),
                                    std::string(kRagBody), std::string(kGemPrefix), std::string(kGemSuffix)};
  for (char c = '0'; c <= '9'; ++c) atoms.emplace_back(1, c);

  const std::string key = "{\"" + field.name + "\": ";
  switch (field.family) {
    case schema::Family::Categorical:
      atoms.push_back(key + "\"");
      atoms.push_back("\"}");
      break;
    case schema::Family::Boolean:
      atoms.push_back(key);
      break;
    case schema::Family::MultiLabel:
      atoms.push_back(key + "[");
      atoms.push_back("]}");
      break;
    case schema::Family::Interval:
    case schema::Family::Optimum:
      atoms.push_back(key);
      atoms.push_back("{\"lower\": ");
      atoms.push_back("\"upper\": ");
      atoms.push_back("-");
      break;
  }
  for (const auto& label : field.vocabulary) {
    if (std::find(atoms.begin(), atoms.end(), label) == atoms.end()) atoms.push_back(label);
  }
  for (const char* p : {"{", "}", "\"", ":", ",", " ", "."}) {
    if (std::find(atoms.begin(), atoms.end(), p) == atoms.end()) atoms.emplace_back(p);
  }
  return Tokenizer(std::move(atoms));
}

const std::string& Tokenizer::atom(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= atoms_.size()) {
    throw Error(ErrorKind::InvalidArgument, "token id " + std::to_string(id) + " out of range");
  }
  return atoms_[static_cast<std::size_t>(id)];
}

int Tokenizer::id_of(std::string_view a) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i] == a) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> Tokenizer::encode(std::string_view text) const {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    int best = -1;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!renders_[i]) continue;
      const auto& a = atoms_[i];
      if (a.size() > best_len && text.compare(pos, a.size(), a) == 0) {
        best = static_cast<int>(i);
        best_len = a.size();
      }
    }
    if (best < 0) {
      out.push_back(kUnk);
      ++pos;
    } else {
      out.push_back(best);
      pos += best_len;
    }
  }
  return out;
}

std::string Tokenizer::decode(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) {
    const auto& a = atom(id);
    if (renders_[static_cast<std::size_t>(id)]) out += a;
  }
  return out;
}

std::string Tokenizer::decode(const std::vector<int>& ids) const {
  return decode(std::span<const int>(ids));
}

std::vector<int> Tokenizer::encode_rag_call() const {
  return {kToolOpen, id_of(kRagBody), kToolClose};
}

std::vector<int> Tokenizer::encode_gem_call(int config_id) const {
  std::vector<int> out = {kToolOpen, id_of(kGemPrefix)};
  for (char c : std::to_string(config_id)) out.push_back(id_of(std::string(1, c)));
  out.push_back(id_of(kGemSuffix));
  out.push_back(kToolClose);
  return out;
}

std::vector<int> Tokenizer::encode_answer(std::string_view answer_text) const {
  auto out = encode(answer_text);
  out.push_back(kEos);
  return out;
}

}  // namespace boundrl::tok
