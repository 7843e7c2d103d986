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

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "core/json_util.hpp"
#include "core/rng.hpp"

namespace boundrl::policy {

// logits(t) = W_o * (mean(E[last k tokens before t]) + W_g * gene) + b
struct PolicyParams {
  int vocab = 32;
  int hidden = 16;
  int gene_dim = 8;
  int window = 4;
  std::vector<double> E;    // vocab x hidden
  std::vector<double> W_g;  // hidden x gene_dim
  std::vector<double> W_o;  // vocab x hidden
  std::vector<double> b;    // vocab

  static PolicyParams zeros(int vocab, int hidden, int gene_dim, int window);
  // Entries drawn from N(0, scale^2); the bias starts at zero.
  static PolicyParams random(int vocab, int hidden, int gene_dim, int window, Rng& rng, double scale);

  // Zero-valued parameters with the same shapes.
  PolicyParams zeros_like() const { return zeros(vocab, hidden, gene_dim, window); }

  std::size_t size() const { return E.size() + W_g.size() + W_o.size() + b.size(); }
  // Flat view in the order E, W_g, W_o, b.
  double& flat(std::size_t i);
  double flat(std::size_t i) const;

  void axpy(double alpha, const PolicyParams& other);  // this += alpha * other
  bool all_finite() const;
  void validate() const;  // throws InvalidArgument on shape mismatch or non-finite values

  Json to_json() const;
  static PolicyParams from_json(const Json& doc);

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

using Gradient = PolicyParams;

struct SamplingConfig {
  double temperature = 1.0;
  double top_p = 0.95;
  int top_k = 50;
  bool greedy = false;  // argmax, the temperature -> 0 limit

  void validate() const;
};

// Log-distribution over the next token given everything in `context`.
std::vector<double> next_logprobs(const PolicyParams& params, std::span<const int> context,
                                  std::span<const double> gene);

// Row t is the log-distribution of token t given tokens[0, t).
std::vector<std::vector<double>> logprobs(const PolicyParams& params, std::span<const int> tokens,
                                          std::span<const double> gene);

// One teacher-forced pass: log-probability of each token at positions where
// `select` is nonzero, 0 elsewhere. Every call increments the pass counter.
std::vector<double> teacher_forced_logprobs(const PolicyParams& params, std::span<const int> tokens,
                                            std::span<const double> gene, std::span<const std::uint8_t> select);

std::uint64_t teacher_forced_pass_count();
void reset_teacher_forced_pass_count();

// grad += scale * d log pi(target | context, gene) / d params. Returns the
// log-probability.
double accumulate_logprob_grad(const PolicyParams& params, std::span<const int> context,
                               std::span<const double> gene, int target, double scale, Gradient& grad);

Gradient grad_logprob(const PolicyParams& params, std::span<const int> context, std::span<const double> gene,
                      int target);

// Exact KL(pi_params || pi_ref) for the next-token distribution; when
// `grad` is non-null also adds scale * dKL/dparams.
double kl_divergence(const PolicyParams& params, const PolicyParams& ref, std::span<const int> context,
                     std::span<const double> gene, double scale = 0.0, Gradient* grad = nullptr);

// Draws from the temperature-scaled, top-k then top-p truncated
// distribution. `logprob`, when given, receives the untempered full-softmax
// log-probability of the drawn token.
int sample_token(const PolicyParams& params, std::span<const int> context, std::span<const double> gene,
                 const SamplingConfig& cfg, Rng& rng, double* logprob = nullptr);

// Sampling step on a precomputed log-distribution.
int sample_from_logprobs(std::span<const double> logp, const SamplingConfig& cfg, Rng& rng);

std::vector<double> log_softmax(std::span<const double> logits);

}  // namespace boundrl::policy
