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

#include "core/gem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>

#include "core/embedded_data.hpp"
#include "core/error.hpp"
#include "core/json_util.hpp"
#include "core/lp.hpp"

namespace boundrl::gem {

const char* to_string(Template t) {
  switch (t) {
    case Template::Archaeal: return "archaeal";
    case Template::GramNegative: return "gram_negative";
    case Template::GramPositive: return "gram_positive";
  }
  return "?";
}

const char* to_string(Perturbation p) {
  switch (p) {
    case Perturbation::RemoveO2: return "remove_O2";
    case Perturbation::RemoveFe3: return "remove_Fe3";
    case Perturbation::RemoveNO3: return "remove_NO3";
    case Perturbation::RemoveNO2: return "remove_NO2";
    case Perturbation::RemoveSO4: return "remove_SO4";
    case Perturbation::RemoveAllFive: return "remove_all_five";
  }
  return "?";
}

std::optional<Template> template_from_string(std::string_view name) {
  for (auto t : kTemplates) {
    if (name == to_string(t)) return t;
  }
  return std::nullopt;
}

const Reaction* MetabolicModel::find_reaction(std::string_view rid) const {
  for (const auto& r : reactions) {
    if (r.id == rid) return &r;
  }
  return nullptr;
}

std::size_t MetabolicModel::reaction_index(std::string_view rid) const {
  for (std::size_t i = 0; i < reactions.size(); ++i) {
    if (reactions[i].id == rid) return i;
  }
  throw Error(ErrorKind::Schema, "model " + id + ": no reaction " + std::string(rid));
}

void MetabolicModel::validate() const {
  const auto fail = [&](const std::string& msg) { throw Error(ErrorKind::Schema, "model " + id + ": " + msg); };
  std::set<std::string> mets;
  for (const auto& m : metabolites) {
    if (!mets.insert(m).second) throw Error(ErrorKind::DuplicateId, "model " + id + ": duplicate metabolite " + m);
  }
  std::set<std::string> rids;
  for (const auto& r : reactions) {
    if (!rids.insert(r.id).second) throw Error(ErrorKind::DuplicateId, "model " + id + ": duplicate reaction " + r.id);
    if (std::isnan(r.lower_bound) || std::isnan(r.upper_bound) || r.lower_bound > r.upper_bound) {
      fail("reaction " + r.id + " has lower bound above upper bound");
    }
    for (const auto& [met, coef] : r.stoichiometry) {
      if (!mets.count(met)) fail("reaction " + r.id + " uses undeclared metabolite " + met);
      if (!std::isfinite(coef)) fail("reaction " + r.id + " has a non-finite coefficient");
    }
  }
  if (!find_reaction(biomass_reaction)) fail("biomass reaction " + biomass_reaction + " not found");
  for (const auto& ex : exchange_reactions) {
    const auto* r = find_reaction(ex);
    if (!r) fail("exchange " + ex + " not found");
    if (r->stoichiometry.size() != 1) fail("exchange " + ex + " must touch exactly one metabolite");
  }
  for (const auto& [component, ex] : components) {
    if (std::find(kComponents.begin(), kComponents.end(), component) == kComponents.end()) {
      throw Error(ErrorKind::UnknownComponent, "model " + id + ": unknown medium component " + component);
    }
  }
}

MetabolicModel MetabolicModel::from_json(const Json& doc) {
  MetabolicModel model;
  try {
    model.id = doc.at("id").get<std::string>();
    const auto tname = doc.at("template").get<std::string>();
    const auto t = template_from_string(tname);
    if (!t) throw Error(ErrorKind::Schema, "model " + model.id + ": unknown template " + tname);
    model.tmpl = *t;
    model.metabolites = doc.at("metabolites").get<std::vector<std::string>>();
    for (const auto& r : doc.at("reactions")) {
      Reaction rx;
      rx.id = r.at("id").get<std::string>();
      for (const auto& [met, coef] : r.at("stoichiometry").items()) rx.stoichiometry[met] = coef.get<double>();
      rx.lower_bound = r.at("lower_bound").get<double>();
      rx.upper_bound = r.at("upper_bound").get<double>();
      model.reactions.push_back(std::move(rx));
    }
    model.biomass_reaction = doc.at("biomass_reaction").get<std::string>();
    model.exchange_reactions = doc.at("exchange_reactions").get<std::vector<std::string>>();
    if (doc.contains("components")) {
      for (const auto& [c, ex] : doc.at("components").items()) model.components[c] = ex.get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("model file: ") + e.what());
  }
  model.validate();
  return model;
}

Json MetabolicModel::to_json() const {
  Json doc = Json::object();
  doc["id"] = id;
  doc["template"] = to_string(tmpl);
  doc["metabolites"] = metabolites;
  Json rxns = Json::array();
  for (const auto& r : reactions) {
    Json s = Json::object();
    for (const auto& [m, c] : r.stoichiometry) s[m] = c;
    rxns.push_back({{"id", r.id}, {"stoichiometry", s}, {"lower_bound", r.lower_bound}, {"upper_bound", r.upper_bound}});
  }
  doc["reactions"] = std::move(rxns);
  doc["biomass_reaction"] = biomass_reaction;
  doc["exchange_reactions"] = exchange_reactions;
  Json comps = Json::object();
  for (const auto& [c, ex] : components) comps[c] = ex;
  doc["components"] = std::move(comps);
  return doc;
}

GemConfig GemConfig::from_id(int config_id) {
  if (config_id < 1 || config_id > 18) {
    throw Error(ErrorKind::InvalidArgument, "configuration id must be in 1..18, got " + std::to_string(config_id));
  }
  const int k = config_id - 1;
  return {config_id, kTemplates[static_cast<std::size_t>(k / 6)], kPerturbations[static_cast<std::size_t>(k % 6)]};
}

int GemConfig::to_id(Template t, Perturbation p) {
  return 6 * static_cast<int>(t) + static_cast<int>(p) + 1;
}

namespace {

// Steady-state LP over reaction fluxes; variables are the reactions in order.
lp::Problem steady_state(const MetabolicModel& model) {
  lp::Problem prob;
  for (const auto& r : model.reactions) prob.add_variable(r.lower_bound, r.upper_bound);
  for (const auto& met : model.metabolites) {
    std::vector<double> row(model.reactions.size(), 0.0);
    bool any = false;
    for (std::size_t j = 0; j < model.reactions.size(); ++j) {
      const auto it = model.reactions[j].stoichiometry.find(met);
      if (it != model.reactions[j].stoichiometry.end() && it->second != 0.0) {
        row[j] = it->second;
        any = true;
      }
    }
    if (any) prob.add_row(std::move(row), lp::Sense::Equal, 0.0);
  }
  return prob;
}

}  // namespace

double fba_max_growth(const MetabolicModel& model) {
  auto prob = steady_state(model);
  prob.maximize = true;
  prob.objective[model.reaction_index(model.biomass_reaction)] = 1.0;
  const auto sol = lp::solve(prob);
  if (sol.status == lp::Status::Infeasible) return 0.0;
  if (sol.status == lp::Status::Unbounded) {
    throw Error(ErrorKind::NumericalFailure, "model " + model.id + ": biomass flux is unbounded");
  }
  return std::max(0.0, sol.objective);
}

MetabolicModel apply_perturbation(const MetabolicModel& model, Perturbation p) {
  std::vector<std::string> removed;
  if (p == Perturbation::RemoveAllFive) {
    removed.assign(kComponents.begin(), kComponents.end());
  } else {
    removed.push_back(kComponents[static_cast<std::size_t>(p)]);
  }
  MetabolicModel out = model;
  for (const auto& component : removed) {
    const auto it = model.components.find(component);
    if (it == model.components.end()) continue;
    const auto& ex = it->second;
    if (std::find(model.exchange_reactions.begin(), model.exchange_reactions.end(), ex) ==
        model.exchange_reactions.end()) {
      throw Error(ErrorKind::UnknownComponent,
                  "model " + model.id + ": component " + component + " maps to " + ex + ", which is not an exchange");
    }
    auto& r = out.reactions[out.reaction_index(ex)];
    // Uptake is the negative-flux direction.
    r.lower_bound = std::max(r.lower_bound, 0.0);
    r.upper_bound = std::max(r.upper_bound, r.lower_bound);
  }
  return out;
}

MinimalMedium minimal_medium(const MetabolicModel& model, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "minimal medium fraction must be in (0, 1]");
  }
  MinimalMedium out;
  out.mu_max = fba_max_growth(model);
  if (out.mu_max <= 0.0) return out;
  out.growth_possible = true;

  auto prob = steady_state(model);
  prob.maximize = false;
  std::vector<std::size_t> aux;
  for (const auto& ex : model.exchange_reactions) {
    const std::size_t u = prob.add_variable(0.0, lp::kInf, 1.0);
    aux.push_back(u);
    std::vector<double> row(prob.num_vars(), 0.0);
    row[u] = 1.0;
    row[model.reaction_index(ex)] = 1.0;
    prob.add_row(std::move(row), lp::Sense::GreaterEq, 0.0);
  }
  std::vector<double> growth(prob.num_vars(), 0.0);
  growth[model.reaction_index(model.biomass_reaction)] = 1.0;
  prob.add_row(std::move(growth), lp::Sense::GreaterEq, fraction * out.mu_max);

  const auto sol = lp::solve(prob);
  if (sol.status != lp::Status::Optimal) {
    throw Error(ErrorKind::NumericalFailure,
                "model " + model.id + ": minimal medium LP is " + lp::to_string(sol.status) + " although growth is possible");
  }
  for (std::size_t e = 0; e < model.exchange_reactions.size(); ++e) {
    const std::size_t j = model.reaction_index(model.exchange_reactions[e]);
    const double uptake = std::max(0.0, -sol.x[j]);
    if (uptake > 1e-9) out.uptakes[model.exchange_reactions[e]] = uptake;
  }
  return out;
}

ModelSet::ModelSet(std::vector<MetabolicModel> models) {
  for (auto& m : models) {
    m.validate();
    const auto t = m.tmpl;
    if (!models_.emplace(t, std::move(m)).second) {
      throw Error(ErrorKind::DuplicateId, std::string("two models for template ") + to_string(t));
    }
  }
}

ModelSet ModelSet::from_json_text(const std::string& text) {
  const auto doc = parse_json(text, "model file");
  if (!doc.is_object() || !doc.contains("models") || !doc["models"].is_array()) {
    throw Error(ErrorKind::Schema, "model file: expected {\"models\": [...]}");
  }
  std::vector<MetabolicModel> models;
  for (const auto& m : doc["models"]) models.push_back(MetabolicModel::from_json(m));
  return ModelSet(std::move(models));
}

ModelSet ModelSet::toy() {
  if (const char* dir = std::getenv("BOUNDRL_DATA_DIR"); dir && *dir) {
    const auto path = std::filesystem::path(dir) / "models" / "toy_gem.json";
    if (std::filesystem::exists(path)) return from_json_text(read_text_file(path));
  }
  return from_json_text(std::string(embedded::toy_gem_json()));
}

const MetabolicModel* ModelSet::find(Template t) const {
  const auto it = models_.find(t);
  return it == models_.end() ? nullptr : &it->second;
}

Json ModelSet::observation(int config_id) const {
  const auto cfg = GemConfig::from_id(config_id);
  {
    std::lock_guard lock(mu_);
    if (const auto it = cache_.find(config_id); it != cache_.end()) return it->second;
  }
  Json dict = Json::object();
  Json error = nullptr;
  if (const auto* model = find(cfg.tmpl)) {
    try {
      const auto medium = minimal_medium(apply_perturbation(*model, cfg.perturbation));
      if (!medium.growth_possible) {
        error = kNoGrowth;
      } else {
        for (const auto& [ex, amount] : medium.uptakes) dict[ex] = round_to(amount, 6);
      }
    } catch (const Error& e) {
      error = e.what();
    }
  } else {
    error = kModelUnavailable;
  }
  Json doc = Json::object();
  doc["tool"] = "gem_tool";
  doc["configuration_id"] = config_id;
  doc["minimal_substrate_dict"] = std::move(dict);
  doc["error"] = std::move(error);
  std::lock_guard lock(mu_);
  cache_.emplace(config_id, doc);
  return doc;
}

}  // namespace boundrl::gem
