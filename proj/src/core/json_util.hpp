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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace boundrl {

using Json = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Parses a document; throws Error{Parse} with `what` in the message.
Json parse_json(const std::string& text, const std::string& what);

struct JsonlLine {
  std::size_t line_number;  // 1-based
  Json value;
};

// Blank lines are skipped. A malformed line throws Error{Parse} naming the
// line number.
std::vector<JsonlLine> parse_jsonl(const std::string& text, const std::string& what);

// Compact single-line serialization with ", " and ": " separators, matching
// the inline style used inside tool observations.
std::string dump_inline(const Json& value);

// Number rendering used by all wire formats: integers without a fraction,
// other values in shortest round-trip form.
std::string dump_number(double value);

double round_to(double value, int decimals);

}  // namespace boundrl
