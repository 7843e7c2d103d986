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

#include <array>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "core/json_util.hpp"

namespace boundrl::gem {

enum class Template { Archaeal, GramNegative, GramPositive };
enum class Perturbation { RemoveO2, RemoveFe3, RemoveNO3, RemoveNO2, RemoveSO4, RemoveAllFive };

inline constexpr std::array<Template, 3> kTemplates = {Template::Archaeal, Template::GramNegative,
                                                        Template::GramPositive};
inline constexpr std::array<Perturbation, 6> kPerturbations = {
    Perturbation::RemoveO2,  Perturbation::RemoveFe3, Perturbation::RemoveNO3,
    Perturbation::RemoveNO2, Perturbation::RemoveSO4, Perturbation::RemoveAllFive};

// Medium components a perturbation can remove, as named in model files.
inline constexpr std::array<const char*, 5> kComponents = {"O2", "Fe3", "NO3", "NO2", "SO4"};

const char* to_string(Template t);
const char* to_string(Perturbation p);
std::optional<Template> template_from_string(std::string_view name);

struct Reaction {
  std::string id;
  std::map<std::string, double> stoichiometry;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  friend bool operator==(const Reaction&, const Reaction&) = default;
};

struct MetabolicModel {
  std::string id;
  Template tmpl = Template::Archaeal;
  std::vector<std::string> metabolites;
  std::vector<Reaction> reactions;
  std::string biomass_reaction;
  std::vector<std::string> exchange_reactions;
  std::map<std::string, std::string> components;  // component -> exchange id

  const Reaction* find_reaction(std::string_view id) const;
  std::size_t reaction_index(std::string_view id) const;  // throws Schema

  // Throws Error{Schema} or Error{DuplicateId} when an invariant fails.
  void validate() const;

  static MetabolicModel from_json(const Json& doc);
  Json to_json() const;

  friend bool operator==(const MetabolicModel&, const MetabolicModel&) = default;
};

struct GemConfig {
  int config_id = 1;
  Template tmpl = Template::Archaeal;
  Perturbation perturbation = Perturbation::RemoveO2;

  static GemConfig from_id(int config_id);  // throws InvalidArgument outside 1..18
  static int to_id(Template t, Perturbation p);
};

// Maximum biomass flux under Sv = 0 and flux bounds; 0 when infeasible.
double fba_max_growth(const MetabolicModel& model);

// Closes the uptake direction of the removed component(s). Components the
// model does not map are skipped. Throws Error{UnknownComponent} when a
// mapping names a reaction that is not an exchange of the model.
MetabolicModel apply_perturbation(const MetabolicModel& model, Perturbation p);

struct MinimalMedium {
  double mu_max = 0.0;
  bool growth_possible = false;
  std::map<std::string, double> uptakes;  // exchange id -> uptake magnitude
};

// Minimizes total uptake flux subject to biomass >= fraction * mu_max.
MinimalMedium minimal_medium(const MetabolicModel& model, double fraction = 0.1);

// Models keyed by biomass template, with gem_tool observations cached per
// configuration. Thread-safe.
class ModelSet {
 public:
  ModelSet() = default;
  explicit ModelSet(std::vector<MetabolicModel> models);
  ModelSet(const ModelSet& other) : models_(other.models_) {}

  // {"version": ..., "models": [...]}
  static ModelSet from_json_text(const std::string& text);
  static ModelSet toy();  // the three models compiled into the library

  const MetabolicModel* find(Template t) const;
  std::size_t size() const { return models_.size(); }

  // Throws Error{InvalidArgument} for ids outside 1..18; every other
  // failure is reported inside the document.
  Json observation(int config_id) const;

 private:
  std::map<Template, MetabolicModel> models_;
  mutable std::mutex mu_;
  mutable std::map<int, Json> cache_;
};

inline constexpr const char* kModelUnavailable = "model unavailable";
inline constexpr const char* kNoGrowth = "no feasible growth under this configuration";

}  // namespace boundrl::gem
