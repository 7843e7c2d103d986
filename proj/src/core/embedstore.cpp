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

#include "core/embedstore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace boundrl::embed {

namespace {

double norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

std::vector<double> unit_copy(std::span<const double> v, const std::string& what) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::ZeroVector, what + " has zero or non-finite norm");
  std::vector<double> out(v.begin(), v.end());
  for (auto& x : out) x /= n;
  return out;
}

void render_into(const Json& value, int depth, std::string& out) {
  constexpr int kExpandDepth = 4;
  const bool container = value.is_structured();
  if (!container || value.empty() || depth >= kExpandDepth) {
    out += container ? dump_inline(value) : value.dump();
    return;
  }
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  out += value.is_object() ? "{\n" : "[\n";
  bool first = true;
  if (value.is_object()) {
    for (const auto& [key, item] : value.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + Json(key).dump() + ": ";
      render_into(item, depth + 1, out);
    }
  } else {
    for (const auto& item : value) {
      if (!first) out += ",\n";
      first = false;
      out += pad;
      render_into(item, depth + 1, out);
    }
  }
  out += "\n" + close_pad + (value.is_object() ? "}" : "]");
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "cosine: dimension mismatch");
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorKind::ZeroVector, "cosine: zero vector");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0) / (na * nb);
}

Store Store::load(std::vector<GenomeRecord> records) {
  Store store;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (i == 0) store.dimension_ = rec.embedding.size();
    if (rec.embedding.size() != store.dimension_ || rec.embedding.empty()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "record " + rec.strain_id + " has dimension " + std::to_string(rec.embedding.size()) +
                      ", store dimension is " + std::to_string(store.dimension_));
    }
    if (!store.index_.emplace(rec.strain_id, i).second) {
      throw Error(ErrorKind::DuplicateId, "duplicate strain id " + rec.strain_id);
    }
    store.unit_.push_back(unit_copy(rec.embedding, "embedding of " + rec.strain_id));
  }
  store.records_ = std::move(records);
  return store;
}

Store Store::load_jsonl(const std::string& text, const schema::Schema& schema) {
  std::vector<GenomeRecord> records;
  for (const auto& [line, doc] : parse_jsonl(text, "store file")) {
    const auto where = "store file: line " + std::to_string(line);
    if (!doc.is_object() || !doc.contains("strain_id") || !doc["strain_id"].is_string() ||
        !doc.contains("embedding") || !doc["embedding"].is_array()) {
      throw Error(ErrorKind::Schema, where + ": expected {\"strain_id\", \"embedding\", \"phenotypes\"}");
    }
    GenomeRecord rec;
    rec.strain_id = doc["strain_id"].get<std::string>();
    for (const auto& x : doc["embedding"]) {
      if (!x.is_number()) throw Error(ErrorKind::Schema, where + ": embedding entries must be numbers");
      rec.embedding.push_back(x.get<double>());
    }
    if (doc.contains("phenotypes")) {
      for (const auto& [name, value] : doc["phenotypes"].items()) {
        const auto* field = schema.find(name);
        if (!field) throw Error(ErrorKind::Schema, where + ": unknown field " + name);
        auto parsed = schema.value_from_json(*field, value);
        if (!parsed.verdict.valid()) {
          throw Error(ErrorKind::Schema, where + ": invalid value for " + name + " (" +
                                             schema::to_string(*parsed.verdict.failure) + ")");
        }
        rec.phenotypes.emplace(name, std::move(*parsed.value));
      }
    }
    records.push_back(std::move(rec));
  }
  try {
    return load(std::move(records));
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("store file: ") + e.what());
  }
}

const GenomeRecord* Store::find(std::string_view strain_id) const {
  const auto it = index_.find(strain_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<Neighbor> Store::top_k_similar(std::span<const double> query, std::size_t k,
                                           std::optional<std::string_view> exclude) const {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "top_k_similar: k must be at least 1");
  if (records_.empty()) return {};
  if (query.size() != dimension_) {
    throw Error(ErrorKind::DimensionMismatch, "query has dimension " + std::to_string(query.size()) +
                                                  ", store dimension is " + std::to_string(dimension_));
  }
  const auto q = unit_copy(query, "query");

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (exclude && records_[i].strain_id == *exclude) continue;
    const double s = std::inner_product(q.begin(), q.end(), unit_[i].begin(), 0.0);
    scored.emplace_back(std::clamp(s, -1.0, 1.0), i);
  }
  const auto better = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return records_[a.second].strain_id < records_[b.second].strain_id;
  };
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);

  std::vector<Neighbor> out;
  for (std::size_t r = 0; r < take; ++r) {
    out.push_back({static_cast<int>(r + 1), records_[scored[r].second].strain_id, scored[r].first});
  }
  return out;
}

Json Store::rag_observation(const schema::Schema& schema, const RagQuery& query,
                            std::span<const std::string> fields, std::size_t k) const {
  std::vector<Neighbor> neighbors;
  if (!records_.empty()) {
    std::vector<double> vec;
    std::optional<std::string_view> exclude;
    if (query.handle) exclude = *query.handle;
    if (query.vector) {
      vec = *query.vector;
    } else if (query.handle) {
      const auto* rec = find(*query.handle);
      if (!rec) throw Error(ErrorKind::InvalidArgument, "unknown handle: " + *query.handle);
      vec = rec->embedding;
    } else {
      throw Error(ErrorKind::InvalidArgument, "rag query needs a handle or a vector");
    }
    neighbors = top_k_similar(vec, k, exclude);
  }

  Json records = Json::array();
  for (const auto& n : neighbors) {
    const auto& rec = *find(n.strain_id);
    Json phenotypes = Json::object();
    for (const auto& name : fields) {
      if (const auto it = rec.phenotypes.find(name); it != rec.phenotypes.end()) {
        phenotypes[name] = schema.value_to_json(it->second);
      }
    }
    Json entry = Json::object();
    entry["rank"] = n.rank;
    entry["similarity"] = round_to(n.similarity, 2);
    entry["phenotypes"] = std::move(phenotypes);
    records.push_back(std::move(entry));
  }
  Json doc = Json::object();
  doc["tool"] = "rag_tool";
  doc["top_similar_records"] = std::move(records);
  doc["retrieved_count"] = neighbors.size();
  return doc;
}

std::string render_observation(const Json& doc) {
  std::string out;
  render_into(doc, 0, out);
  return out;
}

}  // namespace boundrl::embed
