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


#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "boundrl/boundrl.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Failure {
  int code;
  std::string message;
};

// Owns a string returned by the C API.
class ApiString {
 public:
  ApiString() = default;
  ApiString(const ApiString&) = delete;
  ApiString& operator=(const ApiString&) = delete;
  ~ApiString() { br_string_free(ptr_); }
  char** out() { return &ptr_; }
  std::string str() const { return ptr_ ? std::string(ptr_) : std::string(); }

 private:
  char* ptr_ = nullptr;
};

void check(br_status status, int code, const std::string& context) {
  if (status == BR_OK) return;
  throw Failure{code, context + ": " + br_status_name(status) + ": " + br_last_error()};
}

// Input data failures exit 2; argument failures exit 1.
int data_code(br_status status) { return status == BR_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData; }

std::string read_file(const std::string& path, int code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{code, "cannot read " + path};
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kExitData, "cannot write " + path.string()};
  out << text;
  if (!out) throw Failure{kExitData, "write failed: " + path.string()};
}

std::string sha256(const std::string& data) {
  ApiString hex;
  check(br_sha256_hex(data.data(), data.size(), hex.out()), kExitData, "sha256");
  return hex.str();
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)), started_(utc_now()) {}

  void set_config(Json config) { config_ = std::move(config); }
  void set_seed(long long seed) { seed_ = seed; }
  void add_input(const std::string& path, const std::string& content) { inputs_[path] = sha256(content); }

  void write(const fs::path& dir) const {
    Json doc = Json::object();
    doc["command"] = command_;
    doc["version"] = br_version();
    doc["config"] = config_;
    doc["seed"] = seed_;
    Json digests = Json::object();
    for (const auto& [path, hash] : inputs_) digests[path] = "sha256:" + hash;
    doc["inputs"] = std::move(digests);
    doc["started"] = started_;
    doc["finished"] = utc_now();
    write_file(dir / "manifest.json", doc.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::string started_;
  Json config_ = nullptr;
  long long seed_ = 0;
  std::map<std::string, std::string> inputs_;
};

fs::path prepare_out(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Failure{kExitData, "cannot create output directory " + out + ": " + ec.message()};
  return fs::path(out);
}

// Loads and validates a training config, applying a --seed override.
Json load_config(const std::string& path, std::optional<long long> seed, Manifest* manifest) {
  std::string text = "{}";
  if (!path.empty()) {
    text = read_file(path, kExitUsage);
    if (manifest) manifest->add_input(path, text);
  }
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Failure{kExitUsage, "config " + path + ": " + e.what()};
  }
  if (!doc.is_object()) throw Failure{kExitUsage, "config " + path + ": expected a JSON object"};
  if (seed) doc["seed"] = *seed;
  ApiString full;
  check(br_config_show(doc.dump().c_str(), full.out()), kExitUsage, "config");
  return Json::parse(full.str());
}

struct Options {
  std::string config;
  std::optional<long long> seed;
  std::string out;
  int jobs = 1;
};

int cmd_config_show(const Options& opt) {
  std::cout << load_config(opt.config, opt.seed, nullptr).dump(2) << "\n";
  return kExitOk;
}

int cmd_eval(const Options& opt, const std::string& dataset, const std::string& predictions) {
  Manifest manifest("eval");
  manifest.set_seed(opt.seed.value_or(0));
  const auto dataset_text = read_file(dataset, kExitData);
  const auto predictions_text = read_file(predictions, kExitData);
  manifest.add_input(dataset, dataset_text);
  manifest.add_input(predictions, predictions_text);
  ApiString report;
  ApiString table;
  const auto status = br_eval(dataset_text.c_str(), predictions_text.c_str(), report.out(), table.out());
  check(status, data_code(status), "eval");
  const auto dir = prepare_out(opt.out);
  write_file(dir / "report.json", report.str() + "\n");
  write_file(dir / "table.txt", table.str());
  manifest.write(dir);
  std::cout << table.str();
  return kExitOk;
}

int cmd_reward(const Options& opt, const std::string& trajectory, const std::string& truth, double progress) {
  Manifest manifest("reward");
  const auto config = load_config(opt.config, opt.seed, &manifest);
  manifest.set_config(config);
  manifest.set_seed(config["seed"].get<long long>());
  const auto traj_text = read_file(trajectory, kExitData);
  manifest.add_input(trajectory, traj_text);
  std::string truth_text;
  if (!truth.empty()) {
    truth_text = read_file(truth, kExitData);
    manifest.add_input(truth, truth_text);
  }
  ApiString out;
  const auto status = br_reward(traj_text.c_str(), truth.empty() ? nullptr : truth_text.c_str(),
                                config.dump().c_str(), progress, out.out());
  check(status, data_code(status), "reward");
  std::cout << out.str() << "\n";
  if (!opt.out.empty()) {
    const auto dir = prepare_out(opt.out);
    write_file(dir / "reward.json", out.str() + "\n");
    manifest.write(dir);
  }
  return kExitOk;
}

struct StepSink {
  std::ofstream* jsonl;
};

void on_step(const char* step_json, void* user) {
  auto* sink = static_cast<StepSink*>(user);
  *sink->jsonl << step_json << "\n";
  const auto s = Json::parse(step_json);
  std::cout << "step " << s["step"].get<int>() << " reward=" << s["reward_mean"].get<double>()
            << " acc=" << s["accuracy"].get<double>() << " calls=" << s["tool_calls_mean"].get<double>()
            << " delta=" << s["gene_delta_mean"].get<double>() << " loss=" << s["loss"].get<double>() << "\n";
}

int cmd_train_toy(const Options& opt) {
  Manifest manifest("train-toy");
  const auto config = load_config(opt.config, opt.seed, &manifest);
  manifest.set_config(config);
  manifest.set_seed(config["seed"].get<long long>());
  const auto dir = prepare_out(opt.out);
  std::ofstream steps(dir / "steps.jsonl", std::ios::binary | std::ios::trunc);
  if (!steps) throw Failure{kExitData, "cannot write " + (dir / "steps.jsonl").string()};
  StepSink sink{&steps};
  ApiString summary;
  ApiString params;
  const auto status = br_train_toy(config.dump().c_str(), opt.jobs, on_step, &sink, summary.out(), params.out());
  steps.close();
  check(status, data_code(status), "train-toy");
  write_file(dir / "summary.json", summary.str() + "\n");
  write_file(dir / "checkpoint.json", params.str() + "\n");
  manifest.write(dir);
  std::cout << summary.str() << "\n";
  return kExitOk;
}

int cmd_gem(const Options& opt, const std::string& models_path, int config_id) {
  Manifest manifest("gem");
  manifest.set_seed(opt.seed.value_or(0));
  std::string text;
  if (!models_path.empty()) {
    text = read_file(models_path, kExitData);
    manifest.add_input(models_path, text);
  }
  if (config_id < 1 || config_id > 18) throw Failure{kExitUsage, "config id must lie in 1..18"};
  br_models* models = nullptr;
  const auto open = br_models_open(models_path.empty() ? nullptr : text.c_str(), &models);
  check(open, kExitData, "models");
  ApiString out;
  const auto status = br_gem_observation(models, config_id, out.out());
  br_models_close(models);
  check(status, data_code(status), "gem");
  std::cout << out.str() << "\n";
  manifest.set_config(Json{{"config_id", config_id}});
  if (!opt.out.empty()) {
    const auto dir = prepare_out(opt.out);
    write_file(dir / "observation.txt", out.str() + "\n");
    manifest.write(dir);
  }
  return kExitOk;
}

int cmd_rag(const Options& opt, const std::string& store_path, const std::string& handle,
            const std::vector<std::string>& fields) {
  Manifest manifest("rag");
  manifest.set_seed(opt.seed.value_or(0));
  const auto text = read_file(store_path, kExitData);
  manifest.add_input(store_path, text);
  br_store* store = nullptr;
  check(br_store_open(text.c_str(), &store), kExitData, "store");
  std::string fields_json;
  if (!fields.empty()) fields_json = Json(fields).dump();
  ApiString out;
  const auto status = br_rag_observation(store, handle.c_str(), fields.empty() ? nullptr : fields_json.c_str(),
                                         out.out());
  br_store_close(store);
  check(status, data_code(status), "rag");
  std::cout << out.str() << "\n";
  manifest.set_config(Json{{"handle", handle}, {"fields", fields}});
  if (!opt.out.empty()) {
    const auto dir = prepare_out(opt.out);
    write_file(dir / "observation.txt", out.str() + "\n");
    manifest.write(dir);
  }
  return kExitOk;
}

int cmd_distill(const Options& opt, const std::string& candidates_dir) {
  Manifest manifest("distill");
  manifest.set_seed(opt.seed.value_or(0));
  std::error_code ec;
  if (!fs::is_directory(candidates_dir, ec)) throw Failure{kExitData, "not a directory: " + candidates_dir};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(candidates_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> texts;
  for (const auto& f : files) {
    texts.push_back(read_file(f.string(), kExitData));
    manifest.add_input(f.string(), texts.back());
  }

  std::vector<std::string> results(files.size());
  std::vector<std::string> errors(files.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(files.size(), opt.jobs));
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < files.size(); i += workers) {
        ApiString out;
        if (br_distill_bundle(texts[i].c_str(), out.out()) == BR_OK) {
          results[i] = out.str();
        } else {
          errors[i] = br_last_error();
        }
      }
    });
  }
  for (auto& t : threads) t.join();

  std::ostringstream decisions;
  std::ostringstream selected;
  std::ostringstream failures;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto name = files[i].filename().string();
    if (!errors[i].empty() || results[i].empty()) {
      failures << Json{{"file", name}, {"error", errors[i]}}.dump() << "\n";
      std::cerr << "distill: " << name << ": " << errors[i] << "\n";
      continue;
    }
    auto log = Json::parse(results[i]);
    selected << log["selected"].dump() << "\n";
    log.erase("selected");
    Json line = Json::object();
    line["file"] = name;
    for (auto it = log.begin(); it != log.end(); ++it) line[it.key()] = it.value();
    decisions << line.dump() << "\n";
    ++ok;
  }
  const auto dir = prepare_out(opt.out);
  write_file(dir / "decisions.jsonl", decisions.str());
  write_file(dir / "selected.jsonl", selected.str());
  write_file(dir / "errors.jsonl", failures.str());
  manifest.write(dir);
  std::cout << "distilled " << ok << "/" << files.size() << " bundles\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundrl: tool-grounded phenotype prediction toolkit"};
  app.require_subcommand(1);
  Options opt;
  long long seed = 0;
  std::vector<CLI::Option*> seed_opts;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    seed_opts.push_back(cmd->add_option("--seed", seed, "Seed override"));
    auto* out = cmd->add_option("--out", opt.out, "Output run directory");
    if (needs_out) out->required();
    cmd->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  std::string dataset, predictions;
  auto* eval = app.add_subcommand("eval", "Score predictions against a dataset");
  eval->add_option("--dataset", dataset, "Dataset JSONL")->required();
  eval->add_option("--predictions", predictions, "Predictions JSONL")->required();
  add_common(eval, true);

  std::string trajectory, truth;
  double progress = 0.0;
  auto* reward = app.add_subcommand("reward", "Reward breakdown for a trajectory dump");
  reward->add_option("trajectory", trajectory, "Trajectory dump JSON")->required();
  reward->add_option("--truth", truth, "Truth JSON (defaults to the dump's truth)");
  reward->add_option("--progress", progress, "Training progress in [0, 1]")->check(CLI::Range(0.0, 1.0));
  reward->add_option("--config", opt.config, "Training config JSON");
  add_common(reward, false);

  auto* train = app.add_subcommand("train-toy", "Train the toy policy on the synthetic task");
  train->add_option("--config", opt.config, "Training config JSON");
  add_common(train, true);

  std::string models_path;
  int config_id = 0;
  auto* gem = app.add_subcommand("gem", "Print a gem_tool observation");
  gem->add_option("config_id", config_id, "Configuration id 1..18")->required();
  gem->add_option("--models", models_path, "Model set JSON (defaults to the built-in toy models)");
  add_common(gem, false);

  std::string store_path, handle;
  std::vector<std::string> fields;
  auto* rag = app.add_subcommand("rag", "Print a rag_tool observation");
  rag->add_option("handle", handle, "Genome handle")->required();
  rag->add_option("--store", store_path, "Genome store JSONL")->required();
  rag->add_option("--fields", fields, "Fields to include (default all)")->delimiter(',');
  add_common(rag, false);

  std::string candidates_dir;
  auto* distill = app.add_subcommand("distill", "Select, retry-plan and repair candidate bundles");
  distill->add_option("candidates", candidates_dir, "Directory of bundle JSON files")->required();
  add_common(distill, true);

  auto* config = app.add_subcommand("config", "Configuration utilities");
  config->require_subcommand(1);
  auto* show = config->add_subcommand("show", "Print the effective training config");
  show->add_option("--config", opt.config, "Training config JSON");
  seed_opts.push_back(show->add_option("--seed", seed, "Seed override"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  for (const auto* o : seed_opts) {
    if (o->count() > 0) opt.seed = seed;
  }

  try {
    if (*eval) return cmd_eval(opt, dataset, predictions);
    if (*reward) return cmd_reward(opt, trajectory, truth, progress);
    if (*train) return cmd_train_toy(opt);
    if (*gem) return cmd_gem(opt, models_path, config_id);
    if (*rag) return cmd_rag(opt, store_path, handle, fields);
    if (*distill) return cmd_distill(opt, candidates_dir);
    if (*show) return cmd_config_show(opt);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return kExitUsage;
}
