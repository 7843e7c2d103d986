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

#include "core/synthetic.hpp"

#include <cstdio>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace boundrl::synth {

void SyntheticConfig::validate(const schema::Schema& schema) const {
  const auto& f = schema.field(field);
  if (f.family != schema::Family::Categorical) {
    throw Error(ErrorKind::InvalidArgument, "synthetic task needs a categorical field");
  }
  if (gene_dim < 1 || train_strains < 1 || eval_strains < 1) {
    throw Error(ErrorKind::InvalidArgument, "synthetic task sizes must be positive");
  }
  if (!(rag_reliability >= 0.0 && rag_reliability <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "rag_reliability must be in [0, 1]");
  }
}

Json SyntheticConfig::to_json() const {
  Json doc = Json::object();
  doc["field"] = field;
  doc["gene_dim"] = gene_dim;
  doc["train_strains"] = train_strains;
  doc["eval_strains"] = eval_strains;
  doc["rag_reliability"] = rag_reliability;
  doc["seed"] = seed;
  return doc;
}

SyntheticConfig SyntheticConfig::from_json(const Json& doc) {
  SyntheticConfig cfg;
  if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "task config must be an object");
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "field") cfg.field = value.get<std::string>();
      else if (key == "gene_dim") cfg.gene_dim = value.get<int>();
      else if (key == "train_strains") cfg.train_strains = value.get<int>();
      else if (key == "eval_strains") cfg.eval_strains = value.get<int>();
      else if (key == "rag_reliability") cfg.rag_reliability = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else throw Error(ErrorKind::InvalidArgument, "unknown task config key: " + key);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorKind::InvalidArgument, "task config key " + key + " has the wrong type");
    }
  }
  return cfg;
}

std::string SyntheticTask::label_for(const std::vector<double>& gene) const {
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t c = 0; c < directions.size(); ++c) {
    double s = 0.0;
    for (std::size_t j = 0; j < gene.size(); ++j) s += directions[c][j] * gene[j];
    if (c == 0 || s > best_score) {
      best = c;
      best_score = s;
    }
  }
  return labels[best];
}

SyntheticTask make_synthetic_task(const schema::Schema& schema, const SyntheticConfig& cfg) {
  cfg.validate(schema);
  const auto& field = schema.field(cfg.field);
  Rng rng(cfg.seed);
  SyntheticTask task;
  task.field = cfg.field;
  task.labels = field.vocabulary;
  const auto d = static_cast<std::size_t>(cfg.gene_dim);
  for (std::size_t c = 0; c < task.labels.size(); ++c) {
    std::vector<double> u(d);
    for (auto& x : u) x = rng.normal();
    task.directions.push_back(std::move(u));
  }

  std::vector<embed::GenomeRecord> records;
  const int total = cfg.train_strains + cfg.eval_strains;
  for (int i = 0; i < total; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "S%04d", i);
    std::vector<double> gene(d);
    for (auto& x : gene) x = rng.normal();
    const auto label = task.label_for(gene);

    std::string stored = label;
    if (!rng.bernoulli(cfg.rag_reliability) && task.labels.size() > 1) {
      const auto k = rng.below(task.labels.size() - 1);
      std::size_t idx = 0;
      for (std::size_t c = 0, seen = 0; c < task.labels.size(); ++c) {
        if (task.labels[c] == label) continue;
        if (seen++ == k) idx = c;
      }
      stored = task.labels[idx];
    }
    embed::GenomeRecord rec;
    rec.strain_id = id;
    rec.embedding = gene;
    rec.phenotypes.emplace(cfg.field, schema.value_from_json(field, Json(stored)).value.value());
    records.push_back(std::move(rec));

    env::Prompt p;
    p.strain_id = id;
    p.field = cfg.field;
    p.handle = id;
    p.gene = std::move(gene);
    p.truth = Json(label);
    (i < cfg.train_strains ? task.train : task.eval).push_back(std::move(p));
  }
  task.store = embed::Store::load(std::move(records));
  return task;
}

}  // namespace boundrl::synth
