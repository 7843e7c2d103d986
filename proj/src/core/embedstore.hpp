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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/schema.hpp"

namespace boundrl::embed {

struct GenomeRecord {
  std::string strain_id;
  std::vector<double> embedding;
  std::map<std::string, schema::AnswerValue> phenotypes;
};

struct Neighbor {
  int rank = 0;
  std::string strain_id;
  double similarity = 0.0;
};

// What to retrieve against: a stored strain (its own record is excluded from
// the results) or a raw vector, optionally with an id to exclude.
struct RagQuery {
  std::optional<std::string> handle;
  std::optional<std::vector<double>> vector;
};

// Immutable cosine-similarity store over genome embeddings.
class Store {
 public:
  Store() = default;

  // Throws DimensionMismatch, DuplicateId or ZeroVector.
  static Store load(std::vector<GenomeRecord> records);

  // One GenomeRecord per line: {"strain_id", "embedding", "phenotypes"}.
  static Store load_jsonl(const std::string& text, const schema::Schema& schema);

  std::size_t size() const { return records_.size(); }
  std::size_t dimension() const { return dimension_; }
  const GenomeRecord* find(std::string_view strain_id) const;
  std::span<const GenomeRecord> records() const { return records_; }

  // Exhaustive scan; ties broken by ascending strain_id.
  std::vector<Neighbor> top_k_similar(std::span<const double> query, std::size_t k,
                                      std::optional<std::string_view> exclude = std::nullopt) const;

  // rag_tool observation with phenotypes projected onto `fields`.
  Json rag_observation(const schema::Schema& schema, const RagQuery& query,
                       std::span<const std::string> fields, std::size_t k = 3) const;

 private:
  std::vector<GenomeRecord> records_;
  std::vector<std::vector<double>> unit_;  // normalized copies
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t dimension_ = 0;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Fixed layout for tool observations: containers nested less than four levels
// deep are expanded with two-space indentation, deeper ones are written
// inline. Key order is the document's insertion order.
std::string render_observation(const Json& doc);

}  // namespace boundrl::embed
