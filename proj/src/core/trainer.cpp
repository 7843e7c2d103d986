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

#include "core/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "core/error.hpp"
#include "core/gem.hpp"
#include "core/tokenizer.hpp"

namespace boundrl::train {

namespace {

constexpr double kCorrect = 1.0 - 1e-9;

double number(const Json& v, const std::string& key) {
  if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, "train config: " + key + " must be a number");
  return v.get<double>();
}

int integer(const Json& v, const std::string& key) {
  if (!v.is_number_integer()) throw Error(ErrorKind::InvalidArgument, "train config: " + key + " must be an integer");
  return v.get<int>();
}

void require_object(const Json& v, const std::string& key) {
  if (!v.is_object()) throw Error(ErrorKind::InvalidArgument, "train config: " + key + " must be an object");
}

[[noreturn]] void unknown(const std::string& key) {
  throw Error(ErrorKind::InvalidArgument, "train config: unknown key " + key);
}

const char* to_string(grpo::ToolTokenMode mode) {
  return mode == grpo::ToolTokenMode::RawShaping ? "raw_shaping" : "group_normalized";
}

// Clipped gene gaps over answer tokens of one correct trajectory.
void add_clipped_deltas(const grpo::GeneGrounding& gg, const env::PolicyMask& masks, double cap, double& sum,
                        std::size_t& count) {
  for (std::size_t t = 0; t < masks.answer.size(); ++t) {
    if (!masks.answer[t]) continue;
    sum += std::clamp(gg.deltas[t], -cap, cap);
    ++count;
  }
}

struct Setup {
  const schema::Schema& schema;
  synth::SyntheticTask task;
  tok::Tokenizer tokenizer;
  gem::ModelSet models;
  env::Environment environment;

  Setup(const schema::Schema& s, const TrainConfig& cfg)
      : schema(s),
        task(synth::make_synthetic_task(s, cfg.task)),
        tokenizer(tok::Tokenizer::for_field(s.field(cfg.task.field))),
        models(gem::ModelSet::toy()),
        environment(s, tokenizer, &task.store, &models) {}
};

// Teacher trajectories that demonstrate the call/answer format only: the
// gene is zeroed and the answered label is drawn uniformly.
std::vector<env::Trajectory> teacher_batch(const Setup& setup, const TrainConfig& cfg, Rng& rng) {
  const auto& field = setup.schema.field(cfg.task.field);
  std::vector<env::Trajectory> out;
  env::RolloutConfig rc = cfg.rollout;
  for (int i = 0; i < cfg.sft_batch; ++i) {
    auto prompt = setup.task.train[rng.below(setup.task.train.size())];
    std::fill(prompt.gene.begin(), prompt.gene.end(), 0.0);
    const auto& label = setup.task.labels[rng.below(setup.task.labels.size())];
    const int config_id = 1 + static_cast<int>(rng.below(18));
    const auto answer = setup.schema.serialize_answer(field, schema::LabelVal{label});
    env::ScriptedSource source({setup.tokenizer.encode_rag_call(), setup.tokenizer.encode_gem_call(config_id),
                                setup.tokenizer.encode_answer(answer)});
    rc.max_new_tokens = std::max(rc.max_new_tokens, 32);
    out.push_back(setup.environment.run_rollout(source, prompt, rc, rng.next_u64()));
  }
  return out;
}

// Mean over trajectories of the mean negative log-likelihood of their
// model-generated tokens; grad receives its gradient.
double sft_loss_and_grad(const policy::PolicyParams& params, const std::vector<env::Trajectory>& batch,
                         policy::Gradient& grad, int jobs) {
  std::vector<policy::Gradient> grads(batch.size());
  std::vector<double> losses(batch.size(), 0.0);
  parallel_for(batch.size(), jobs, [&](std::size_t i) {
    grads[i] = params.zeros_like();
    const auto tokens = batch[i].token_stream();
    const auto masks = env::build_policy_mask(batch[i]);
    std::size_t valid = 0;
    for (auto m : masks.policy) valid += m;
    if (valid == 0) return;
    const double w = 1.0 / static_cast<double>(valid);
    const std::span<const int> all(tokens);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (!masks.policy[t]) continue;
      losses[i] -= w * policy::accumulate_logprob_grad(params, all.first(t), batch[i].gene, tokens[t], -w, grads[i]);
    }
  });
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    grad.axpy(inv, grads[i]);
    loss += inv * losses[i];
  }
  return loss;
}

}  // namespace

TrajectoryReward score_trajectory_reward(const schema::Schema& schema, const env::Trajectory& traj,
                                         const Json& truth_json, double progress, const rewards::RewardConfig& cfg) {
  const auto& field = schema.field(traj.field);
  const auto truth = schema.value_from_json(field, truth_json);
  if (!truth.verdict.valid()) throw Error(ErrorKind::Schema, "invalid truth for field " + traj.field);
  TrajectoryReward out;
  out.tool_calls = static_cast<int>(traj.tool_calls.size());
  if (traj.final_answer_text) {
    auto parsed = schema.parse_final_answer(*traj.final_answer_text, field);
    out.verdict = parsed.verdict;
    out.prediction = std::move(parsed.value);
  } else {
    out.verdict = schema::StrictVerdict::fail(schema::FailureReason::NotJson);
  }
  rewards::RewardInputs in;
  in.r_json = rewards::json_format_reward(out.verdict);
  in.r_corr = rewards::correctness_reward(schema, field, out.prediction, *truth.value, cfg.correctness);
  in.r_tool = rewards::tool_use_reward(out.tool_calls, progress, cfg.schedule);
  in.r_nt = rewards::no_tool_penalty(out.tool_calls, in.r_corr);
  out.breakdown = rewards::composite_reward(in, cfg.weights);
  return out;
}

void TrainConfig::validate(const schema::Schema& schema) const {
  if (steps < 0 || prompts_per_step < 1 || sft_steps < 0 || sft_batch < 1) {
    throw Error(ErrorKind::InvalidArgument, "train config: step and batch counts must be positive");
  }
  if (!(lr >= 0.0) || !std::isfinite(lr) || !(sft_lr >= 0.0) || !std::isfinite(sft_lr)) {
    throw Error(ErrorKind::InvalidArgument, "train config: learning rates must be finite and >= 0");
  }
  if (hidden < 1 || window < 1 || !(init_scale >= 0.0) || eval_every < 0) {
    throw Error(ErrorKind::InvalidArgument, "train config: invalid policy shape");
  }
  advantage.validate();
  gene.validate();
  reward.validate();
  rollout.validate();
  task.validate(schema);
}

Json TrainConfig::to_json() const {
  Json doc = Json::object();
  doc["seed"] = seed;
  doc["steps"] = steps;
  doc["prompts_per_step"] = prompts_per_step;
  doc["lr"] = lr;
  doc["sft"] = {{"steps", sft_steps}, {"batch", sft_batch}, {"lr", sft_lr}};
  doc["policy"] = {{"hidden", hidden}, {"window", window}, {"init_scale", init_scale}};
  doc["eval_every"] = eval_every;
  Json adv = Json::object();
  adv["group_size"] = advantage.group_size;
  adv["eps_norm"] = advantage.eps_norm;
  adv["clip_eps"] = advantage.clip_eps;
  adv["kl_beta"] = advantage.kl_beta;
  adv["w_tool_token"] = advantage.w_tool_token;
  adv["w_gene"] = advantage.w_gene;
  adv["w_attn"] = advantage.w_attn;
  adv["tool_token_mode"] = to_string(advantage.tool_token_mode);
  doc["advantage"] = std::move(adv);
  doc["gene_grounding"] = {{"cap", gene.cap}, {"positive_gate", gene.positive_gate}};
  doc["reward"] = reward.to_json();
  Json ro = Json::object();
  ro["max_tool_rounds"] = rollout.max_tool_rounds;
  ro["max_new_tokens"] = rollout.max_new_tokens;
  ro["temperature"] = rollout.sampling.temperature;
  ro["top_p"] = rollout.sampling.top_p;
  ro["top_k"] = rollout.sampling.top_k;
  doc["rollout"] = std::move(ro);
  doc["task"] = task.to_json();
  return doc;
}

TrainConfig TrainConfig::from_json(const Json& doc) {
  require_object(doc, "root");
  TrainConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
        throw Error(ErrorKind::InvalidArgument, "train config: seed must be a non-negative integer");
      }
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "steps") {
      cfg.steps = integer(value, key);
    } else if (key == "prompts_per_step") {
      cfg.prompts_per_step = integer(value, key);
    } else if (key == "lr") {
      cfg.lr = number(value, key);
    } else if (key == "eval_every") {
      cfg.eval_every = integer(value, key);
    } else if (key == "sft") {
      require_object(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k == "steps") cfg.sft_steps = integer(v, "sft.steps");
        else if (k == "batch") cfg.sft_batch = integer(v, "sft.batch");
        else if (k == "lr") cfg.sft_lr = number(v, "sft.lr");
        else unknown("sft." + k);
      }
    } else if (key == "policy") {
      require_object(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k == "hidden") cfg.hidden = integer(v, "policy.hidden");
        else if (k == "window") cfg.window = integer(v, "policy.window");
        else if (k == "init_scale") cfg.init_scale = number(v, "policy.init_scale");
        else unknown("policy." + k);
      }
    } else if (key == "advantage") {
      require_object(value, key);
      for (const auto& [k, v] : value.items()) {
        auto& a = cfg.advantage;
        if (k == "group_size") a.group_size = integer(v, "advantage.group_size");
        else if (k == "eps_norm") a.eps_norm = number(v, "advantage.eps_norm");
        else if (k == "clip_eps") a.clip_eps = number(v, "advantage.clip_eps");
        else if (k == "kl_beta") a.kl_beta = number(v, "advantage.kl_beta");
        else if (k == "w_tool_token") a.w_tool_token = number(v, "advantage.w_tool_token");
        else if (k == "w_gene") a.w_gene = number(v, "advantage.w_gene");
        else if (k == "w_attn") a.w_attn = number(v, "advantage.w_attn");
        else if (k == "tool_token_mode") {
          const auto mode = v.is_string() ? v.get<std::string>() : "";
          if (mode == "raw_shaping") a.tool_token_mode = grpo::ToolTokenMode::RawShaping;
          else if (mode == "group_normalized") a.tool_token_mode = grpo::ToolTokenMode::GroupNormalized;
          else throw Error(ErrorKind::InvalidArgument, "train config: tool_token_mode must be raw_shaping or group_normalized");
        } else {
          unknown("advantage." + k);
        }
      }
    } else if (key == "gene_grounding") {
      require_object(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k == "cap") cfg.gene.cap = number(v, "gene_grounding.cap");
        else if (k == "positive_gate") {
          if (!v.is_boolean()) throw Error(ErrorKind::InvalidArgument, "train config: positive_gate must be a boolean");
          cfg.gene.positive_gate = v.get<bool>();
        } else {
          unknown("gene_grounding." + k);
        }
      }
    } else if (key == "reward") {
      cfg.reward = rewards::RewardConfig::from_json(value);
    } else if (key == "rollout") {
      require_object(value, key);
      for (const auto& [k, v] : value.items()) {
        auto& r = cfg.rollout;
        if (k == "max_tool_rounds") r.max_tool_rounds = integer(v, "rollout.max_tool_rounds");
        else if (k == "max_new_tokens") r.max_new_tokens = integer(v, "rollout.max_new_tokens");
        else if (k == "temperature") r.sampling.temperature = number(v, "rollout.temperature");
        else if (k == "top_p") r.sampling.top_p = number(v, "rollout.top_p");
        else if (k == "top_k") r.sampling.top_k = integer(v, "rollout.top_k");
        else unknown("rollout." + k);
      }
    } else if (key == "task") {
      cfg.task = synth::SyntheticConfig::from_json(value);
    } else {
      unknown(key);
    }
  }
  cfg.advantage.validate();
  cfg.gene.validate();
  cfg.rollout.validate();
  return cfg;
}

Json StepReport::to_json() const {
  Json doc = Json::object();
  doc["step"] = step;
  doc["progress"] = progress;
  doc["reward_mean"] = reward_mean;
  doc["r_json_mean"] = r_json_mean;
  doc["r_corr_mean"] = r_corr_mean;
  doc["r_tool_mean"] = r_tool_mean;
  doc["accuracy"] = accuracy;
  doc["tool_calls_mean"] = tool_calls_mean;
  doc["gene_delta_mean"] = gene_delta_mean;
  doc["gene_delta_tokens"] = gene_delta_tokens;
  doc["loss"] = loss;
  doc["clip_fraction"] = clip_fraction;
  doc["kl"] = kl;
  if (eval) doc["eval"] = *eval;
  return doc;
}

Json EvalReport::to_json() const {
  Json doc = Json::object();
  doc["n"] = n;
  doc["accuracy"] = accuracy;
  doc["accuracy_gene_ablated"] = accuracy_gene_ablated;
  doc["json_valid_rate"] = json_valid_rate;
  doc["mean_tool_calls"] = mean_tool_calls;
  doc["mean_clipped_delta"] = mean_clipped_delta;
  doc["delta_tokens"] = delta_tokens;
  return doc;
}

double TrainReport::final_window_delta(double fraction) const {
  if (steps.empty()) return 0.0;
  const auto n = static_cast<std::size_t>(std::ceil(std::clamp(fraction, 0.0, 1.0) * static_cast<double>(steps.size())));
  double sum = 0.0;
  std::size_t tokens = 0;
  for (std::size_t i = steps.size() - std::max<std::size_t>(n, 1); i < steps.size(); ++i) {
    sum += steps[i].gene_delta_mean * static_cast<double>(steps[i].gene_delta_tokens);
    tokens += steps[i].gene_delta_tokens;
  }
  return tokens == 0 ? 0.0 : sum / static_cast<double>(tokens);
}

Json TrainReport::summary_json() const {
  Json doc = Json::object();
  doc["steps"] = steps.size();
  doc["sft_final_loss"] = sft_final_loss;
  doc["final_window_delta"] = final_window_delta();
  if (!steps.empty()) doc["last_step"] = steps.back().to_json();
  doc["final_eval"] = final_eval.to_json();
  return doc;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

EvalReport evaluate_policy(const policy::PolicyParams& params, const env::Environment& environment,
                           const std::vector<env::Prompt>& prompts, const TrainConfig& cfg, int jobs) {
  EvalReport report;
  report.n = prompts.size();
  if (prompts.empty()) return report;
  env::RolloutConfig rc = cfg.rollout;
  rc.sampling.greedy = true;
  struct Row {
    bool correct = false;
    bool correct_ablated = false;
    bool valid = false;
    int calls = 0;
    double delta_sum = 0.0;
    std::size_t delta_count = 0;
  };
  std::vector<Row> rows(prompts.size());
  parallel_for(prompts.size(), jobs, [&](std::size_t i) {
    const auto& prompt = prompts[i];
    env::PolicySource source(params, rc.sampling);
    const auto traj = environment.run_rollout(source, prompt, rc, mix_seed(cfg.seed, i));
    const auto scored = score_trajectory_reward(environment.schema(), traj, *prompt.truth, 1.0, cfg.reward);
    rows[i].correct = scored.breakdown.r_corr >= kCorrect;
    rows[i].valid = scored.verdict.valid();
    rows[i].calls = scored.tool_calls;
    if (rows[i].correct) {
      const auto masks = env::build_policy_mask(traj);
      const auto gg = grpo::gene_grounding_rewards(params, traj, masks, scored.breakdown.r_corr, cfg.gene);
      add_clipped_deltas(gg, masks, cfg.gene.cap, rows[i].delta_sum, rows[i].delta_count);
    }
    auto ablated = prompt;
    std::fill(ablated.gene.begin(), ablated.gene.end(), 0.0);
    env::PolicySource source0(params, rc.sampling);
    const auto traj0 = environment.run_rollout(source0, ablated, rc, mix_seed(cfg.seed, i));
    const auto scored0 = score_trajectory_reward(environment.schema(), traj0, *prompt.truth, 1.0, cfg.reward);
    rows[i].correct_ablated = scored0.breakdown.r_corr >= kCorrect;
  });
  double delta_sum = 0.0;
  for (const auto& r : rows) {
    report.accuracy += r.correct;
    report.accuracy_gene_ablated += r.correct_ablated;
    report.json_valid_rate += r.valid;
    report.mean_tool_calls += r.calls;
    delta_sum += r.delta_sum;
    report.delta_tokens += r.delta_count;
  }
  const double n = static_cast<double>(prompts.size());
  report.accuracy /= n;
  report.accuracy_gene_ablated /= n;
  report.json_valid_rate /= n;
  report.mean_tool_calls /= n;
  if (report.delta_tokens > 0) report.mean_clipped_delta = delta_sum / static_cast<double>(report.delta_tokens);
  return report;
}

TrainReport train_toy(const TrainConfig& cfg, const std::function<void(const StepReport&)>& on_step, int jobs) {
  const auto& schema = schema::Schema::standard();
  cfg.validate(schema);
  Setup setup(schema, cfg);
  const auto V = static_cast<int>(setup.tokenizer.vocab_size());

  Rng init_rng(mix_seed(cfg.seed, 0));
  TrainReport report;
  report.params = policy::PolicyParams::random(V, cfg.hidden, cfg.task.gene_dim, cfg.window, init_rng, cfg.init_scale);
  auto& params = report.params;

  Rng sft_rng(mix_seed(cfg.seed, 1));
  for (int s = 0; s < cfg.sft_steps; ++s) {
    const auto batch = teacher_batch(setup, cfg, sft_rng);
    auto grad = params.zeros_like();
    report.sft_final_loss = sft_loss_and_grad(params, batch, grad, jobs);
    params.axpy(-cfg.sft_lr, grad);
    if (!std::isfinite(report.sft_final_loss) || !params.all_finite()) {
      throw Error(ErrorKind::Divergence, "warm start diverged at step " + std::to_string(s));
    }
  }

  std::optional<policy::PolicyParams> reference;
  if (cfg.advantage.kl_beta > 0.0) reference = params;

  const auto G = static_cast<std::size_t>(cfg.advantage.group_size);
  const std::size_t B = static_cast<std::size_t>(cfg.prompts_per_step) * G;
  Rng prompt_rng(mix_seed(cfg.seed, 2));

  for (int step = 0; step < cfg.steps; ++step) {
    StepReport sr;
    sr.step = step;
    sr.progress = cfg.steps > 1 ? static_cast<double>(step) / static_cast<double>(cfg.steps - 1) : 1.0;

    std::vector<std::size_t> chosen(static_cast<std::size_t>(cfg.prompts_per_step));
    for (auto& c : chosen) c = prompt_rng.below(setup.task.train.size());

    std::vector<env::Trajectory> trajs(B);
    std::vector<TrajectoryReward> scores(B);
    const std::uint64_t step_seed = mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(step));
    parallel_for(B, jobs, [&](std::size_t i) {
      const auto& prompt = setup.task.train[chosen[i / G]];
      env::PolicySource source(params, cfg.rollout.sampling);
      trajs[i] = setup.environment.run_rollout(source, prompt, cfg.rollout, mix_seed(step_seed, i));
      scores[i] = score_trajectory_reward(schema, trajs[i], *prompt.truth, sr.progress, cfg.reward);
    });

    std::vector<double> composite(B), tool_raw(B);
    for (std::size_t i = 0; i < B; ++i) {
      composite[i] = scores[i].breakdown.composite;
      tool_raw[i] = scores[i].breakdown.r_tool;
    }
    const auto seq_adv = grpo::group_advantages(composite, cfg.advantage.group_size, cfg.advantage.eps_norm);
    const auto tool_values = cfg.advantage.tool_token_mode == grpo::ToolTokenMode::RawShaping
                                 ? tool_raw
                                 : grpo::group_advantages(tool_raw, cfg.advantage.group_size, cfg.advantage.eps_norm);

    std::vector<grpo::LossResult> results(B);
    std::vector<double> delta_sum(B, 0.0);
    std::vector<std::size_t> delta_count(B, 0);
    parallel_for(B, jobs, [&](std::size_t i) {
      const auto& traj = trajs[i];
      const auto masks = env::build_policy_mask(traj);
      const double r_corr = scores[i].breakdown.r_corr;
      const auto gg = grpo::gene_grounding_rewards(params, traj, masks, r_corr, cfg.gene);
      if (r_corr > 0.0) add_clipped_deltas(gg, masks, cfg.gene.cap, delta_sum[i], delta_count[i]);
      const auto adv = grpo::assemble_token_advantages(masks, seq_adv[i], tool_values[i], gg.values, cfg.advantage);
      const auto tokens = traj.token_stream();
      const auto old_lp = traj.old_logprobs();
      const grpo::SequenceBatchItem item{tokens, traj.gene, old_lp, adv.total, masks.policy};
      results[i] = grpo::grpo_loss_and_grad(params, std::span(&item, 1), cfg.advantage,
                                            reference ? &*reference : nullptr);
    });

    auto grad = params.zeros_like();
    const double inv = 1.0 / static_cast<double>(B);
    std::size_t valid = 0, clipped = 0, delta_tokens = 0;
    double total_delta = 0.0;
    for (std::size_t i = 0; i < B; ++i) {
      grad.axpy(inv, results[i].grad);
      sr.loss += inv * results[i].loss;
      sr.kl += inv * results[i].kl;
      valid += results[i].valid_tokens;
      clipped += results[i].clipped_tokens;
      total_delta += delta_sum[i];
      delta_tokens += delta_count[i];
      sr.reward_mean += inv * scores[i].breakdown.composite;
      sr.r_json_mean += inv * scores[i].breakdown.r_json;
      sr.r_corr_mean += inv * scores[i].breakdown.r_corr;
      sr.r_tool_mean += inv * scores[i].breakdown.r_tool;
      sr.tool_calls_mean += inv * scores[i].tool_calls;
      sr.accuracy += inv * (scores[i].breakdown.r_corr >= kCorrect ? 1.0 : 0.0);
    }
    sr.clip_fraction = valid ? static_cast<double>(clipped) / static_cast<double>(valid) : 0.0;
    sr.gene_delta_tokens = delta_tokens;
    sr.gene_delta_mean = delta_tokens ? total_delta / static_cast<double>(delta_tokens) : 0.0;
    if (!std::isfinite(sr.loss)) {
      throw Error(ErrorKind::Divergence, "non-finite loss at step " + std::to_string(step));
    }
    params.axpy(-cfg.lr, grad);
    if (!params.all_finite()) {
      throw Error(ErrorKind::Divergence, "non-finite parameters after step " + std::to_string(step));
    }
    if (cfg.eval_every > 0 && (step + 1) % cfg.eval_every == 0) {
      sr.eval = evaluate_policy(params, setup.environment, setup.task.eval, cfg, jobs).to_json();
    }
    if (on_step) on_step(sr);
    report.steps.push_back(std::move(sr));
  }
  report.final_eval = evaluate_policy(params, setup.environment, setup.task.eval, cfg, jobs);
  return report;
}

}  // namespace boundrl::train
