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

#include <cstdint>
#include <string>
#include <vector>

#include "core/agent_env.hpp"
#include "core/embedstore.hpp"
#include "core/schema.hpp"

namespace boundrl::synth {

// A categorical task whose label is a linear function of the gene vector:
// label = argmax_c <u_c, gene>. The retrieval store holds every strain with
// a stored label that is correct with probability `rag_reliability`.
struct SyntheticConfig {
  std::string field = "gram_stain";
  int gene_dim = 8;
  int train_strains = 200;
  int eval_strains = 100;
  double rag_reliability = 0.7;
  std::uint64_t seed = 2024;

  void validate(const schema::Schema& schema) const;
  Json to_json() const;
  static SyntheticConfig from_json(const Json& doc);
};

struct SyntheticTask {
  std::string field;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> directions;  // one u_c per label
  std::vector<env::Prompt> train;
  std::vector<env::Prompt> eval;
  embed::Store store;

  std::string label_for(const std::vector<double>& gene) const;
};

SyntheticTask make_synthetic_task(const schema::Schema& schema, const SyntheticConfig& cfg);

}  // namespace boundrl::synth
