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

#include "core/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "core/error.hpp"

namespace boundrl::policy {

namespace {

std::atomic<std::uint64_t> g_teacher_forced_passes{0};

struct Forward {
  std::vector<double> z;
  std::vector<double> logp;
  std::span<const int> window;
};

void check_inputs(const PolicyParams& p, std::span<const int> context, std::span<const double> gene) {
  if (gene.size() != static_cast<std::size_t>(p.gene_dim)) {
    throw Error(ErrorKind::DimensionMismatch, "gene has dimension " + std::to_string(gene.size()) +
                                                  ", policy expects " + std::to_string(p.gene_dim));
  }
  for (int t : context) {
    if (t < 0 || t >= p.vocab) throw Error(ErrorKind::InvalidArgument, "token id " + std::to_string(t) + " out of range");
  }
}

Forward forward(const PolicyParams& p, std::span<const int> context, std::span<const double> gene) {
  const auto h = static_cast<std::size_t>(p.hidden);
  const auto d = static_cast<std::size_t>(p.gene_dim);
  const auto V = static_cast<std::size_t>(p.vocab);
  Forward fw;
  const std::size_t n = std::min(context.size(), static_cast<std::size_t>(p.window));
  fw.window = context.subspan(context.size() - n);
  fw.z.assign(h, 0.0);
  for (int t : fw.window) {
    const double* row = &p.E[static_cast<std::size_t>(t) * h];
    for (std::size_t i = 0; i < h; ++i) fw.z[i] += row[i];
  }
  if (n > 0) {
    for (auto& v : fw.z) v /= static_cast<double>(n);
  }
  for (std::size_t i = 0; i < h; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += p.W_g[i * d + j] * gene[j];
    fw.z[i] += acc;
  }
  std::vector<double> logits(V);
  for (std::size_t v = 0; v < V; ++v) {
    double acc = p.b[v];
    for (std::size_t i = 0; i < h; ++i) acc += p.W_o[v * h + i] * fw.z[i];
    logits[v] = acc;
  }
  fw.logp = log_softmax(logits);
  return fw;
}

// grad += scale * backprop of dlogits through the network.
void backprop(const PolicyParams& p, const Forward& fw, std::span<const double> gene,
              const std::vector<double>& dlogits, double scale, Gradient& g) {
  const auto h = static_cast<std::size_t>(p.hidden);
  const auto d = static_cast<std::size_t>(p.gene_dim);
  const auto V = static_cast<std::size_t>(p.vocab);
  std::vector<double> dz(h, 0.0);
  for (std::size_t v = 0; v < V; ++v) {
    const double dl = scale * dlogits[v];
    if (dl == 0.0) continue;
    g.b[v] += dl;
    for (std::size_t i = 0; i < h; ++i) {
      g.W_o[v * h + i] += dl * fw.z[i];
      dz[i] += dl * p.W_o[v * h + i];
    }
  }
  if (!fw.window.empty()) {
    const double inv = 1.0 / static_cast<double>(fw.window.size());
    for (int t : fw.window) {
      double* row = &g.E[static_cast<std::size_t>(t) * h];
      for (std::size_t i = 0; i < h; ++i) row[i] += dz[i] * inv;
    }
  }
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < d; ++j) g.W_g[i * d + j] += dz[i] * gene[j];
  }
}

void check_shapes(const PolicyParams& p, const Gradient& g) {
  if (g.vocab != p.vocab || g.hidden != p.hidden || g.gene_dim != p.gene_dim || g.size() != p.size()) {
    throw Error(ErrorKind::DimensionMismatch, "gradient shape does not match parameters");
  }
}

std::vector<double> read_array(const Json& doc, const char* key, std::size_t expected) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != expected) {
    throw Error(ErrorKind::Schema, std::string("checkpoint: ") + key + " must be an array of " +
                                       std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : doc[key]) {
    if (!v.is_number()) throw Error(ErrorKind::Schema, std::string("checkpoint: ") + key + " has a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::vector<double> log_softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (double x : logits) s += std::exp(x - m);
  const double lse = m + std::log(s);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

PolicyParams PolicyParams::zeros(int vocab, int hidden, int gene_dim, int window) {
  if (vocab < 1 || hidden < 1 || gene_dim < 1 || window < 1) {
    throw Error(ErrorKind::InvalidArgument, "policy dimensions must be positive");
  }
  PolicyParams p;
  p.vocab = vocab;
  p.hidden = hidden;
  p.gene_dim = gene_dim;
  p.window = window;
  const auto V = static_cast<std::size_t>(vocab);
  const auto h = static_cast<std::size_t>(hidden);
  const auto d = static_cast<std::size_t>(gene_dim);
  p.E.assign(V * h, 0.0);
  p.W_g.assign(h * d, 0.0);
  p.W_o.assign(V * h, 0.0);
  p.b.assign(V, 0.0);
  return p;
}

PolicyParams PolicyParams::random(int vocab, int hidden, int gene_dim, int window, Rng& rng, double scale) {
  auto p = zeros(vocab, hidden, gene_dim, window);
  for (auto* block : {&p.E, &p.W_g, &p.W_o}) {
    for (auto& v : *block) v = scale * rng.normal();
  }
  return p;
}

double& PolicyParams::flat(std::size_t i) {
  for (auto* block : {&E, &W_g, &W_o, &b}) {
    if (i < block->size()) return (*block)[i];
    i -= block->size();
  }
  throw Error(ErrorKind::InvalidArgument, "parameter index out of range");
}

double PolicyParams::flat(std::size_t i) const { return const_cast<PolicyParams*>(this)->flat(i); }

void PolicyParams::axpy(double alpha, const PolicyParams& other) {
  check_shapes(*this, other);
  const auto add = [alpha](std::vector<double>& dst, const std::vector<double>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += alpha * src[i];
  };
  add(E, other.E);
  add(W_g, other.W_g);
  add(W_o, other.W_o);
  add(b, other.b);
}

bool PolicyParams::all_finite() const {
  const auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(E) && finite(W_g) && finite(W_o) && finite(b);
}

void PolicyParams::validate() const {
  const auto V = static_cast<std::size_t>(vocab);
  const auto h = static_cast<std::size_t>(hidden);
  const auto d = static_cast<std::size_t>(gene_dim);
  if (vocab < 1 || hidden < 1 || gene_dim < 1 || window < 1 || E.size() != V * h || W_g.size() != h * d ||
      W_o.size() != V * h || b.size() != V) {
    throw Error(ErrorKind::InvalidArgument, "policy parameters have inconsistent shapes");
  }
  if (!all_finite()) throw Error(ErrorKind::InvalidArgument, "policy parameters are not finite");
}

Json PolicyParams::to_json() const {
  Json doc = Json::object();
  doc["vocab"] = vocab;
  doc["hidden"] = hidden;
  doc["gene_dim"] = gene_dim;
  doc["window"] = window;
  doc["E"] = E;
  doc["W_g"] = W_g;
  doc["W_o"] = W_o;
  doc["b"] = b;
  return doc;
}

PolicyParams PolicyParams::from_json(const Json& doc) {
  const auto dim = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_integer()) {
      throw Error(ErrorKind::Schema, std::string("checkpoint: missing integer ") + key);
    }
    return doc[key].get<int>();
  };
  auto p = zeros(dim("vocab"), dim("hidden"), dim("gene_dim"), dim("window"));
  p.E = read_array(doc, "E", p.E.size());
  p.W_g = read_array(doc, "W_g", p.W_g.size());
  p.W_o = read_array(doc, "W_o", p.W_o.size());
  p.b = read_array(doc, "b", p.b.size());
  p.validate();
  return p;
}

void SamplingConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorKind::InvalidArgument, "temperature must be positive");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "top_p must be in (0, 1]");
  if (top_k < 1) throw Error(ErrorKind::InvalidArgument, "top_k must be at least 1");
}

std::vector<double> next_logprobs(const PolicyParams& params, std::span<const int> context,
                                  std::span<const double> gene) {
  check_inputs(params, context, gene);
  return forward(params, context, gene).logp;
}

std::vector<std::vector<double>> logprobs(const PolicyParams& params, std::span<const int> tokens,
                                          std::span<const double> gene) {
  check_inputs(params, tokens, gene);
  std::vector<std::vector<double>> out;
  out.reserve(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) out.push_back(forward(params, tokens.first(t), gene).logp);
  return out;
}

std::vector<double> teacher_forced_logprobs(const PolicyParams& params, std::span<const int> tokens,
                                            std::span<const double> gene, std::span<const std::uint8_t> select) {
  if (select.size() != tokens.size()) {
    throw Error(ErrorKind::MaskMisalignment, "selection mask length differs from token count");
  }
  check_inputs(params, tokens, gene);
  g_teacher_forced_passes.fetch_add(1, std::memory_order_relaxed);
  std::vector<double> out(tokens.size(), 0.0);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (!select[t]) continue;
    out[t] = forward(params, tokens.first(t), gene).logp[static_cast<std::size_t>(tokens[t])];
  }
  return out;
}

std::uint64_t teacher_forced_pass_count() { return g_teacher_forced_passes.load(); }
void reset_teacher_forced_pass_count() { g_teacher_forced_passes.store(0); }

double accumulate_logprob_grad(const PolicyParams& params, std::span<const int> context,
                               std::span<const double> gene, int target, double scale, Gradient& grad) {
  check_inputs(params, context, gene);
  check_shapes(params, grad);
  if (target < 0 || target >= params.vocab) throw Error(ErrorKind::InvalidArgument, "target token out of range");
  const auto fw = forward(params, context, gene);
  std::vector<double> dlogits(fw.logp.size());
  for (std::size_t v = 0; v < dlogits.size(); ++v) dlogits[v] = -std::exp(fw.logp[v]);
  dlogits[static_cast<std::size_t>(target)] += 1.0;
  backprop(params, fw, gene, dlogits, scale, grad);
  return fw.logp[static_cast<std::size_t>(target)];
}

Gradient grad_logprob(const PolicyParams& params, std::span<const int> context, std::span<const double> gene,
                      int target) {
  auto g = params.zeros_like();
  accumulate_logprob_grad(params, context, gene, target, 1.0, g);
  return g;
}

double kl_divergence(const PolicyParams& params, const PolicyParams& ref, std::span<const int> context,
                     std::span<const double> gene, double scale, Gradient* grad) {
  check_inputs(params, context, gene);
  const auto fw = forward(params, context, gene);
  const auto logq = forward(ref, context, gene).logp;
  double kl = 0.0;
  for (std::size_t v = 0; v < logq.size(); ++v) kl += std::exp(fw.logp[v]) * (fw.logp[v] - logq[v]);
  if (grad) {
    check_shapes(params, *grad);
    std::vector<double> dlogits(logq.size());
    for (std::size_t v = 0; v < logq.size(); ++v) dlogits[v] = std::exp(fw.logp[v]) * (fw.logp[v] - logq[v] - kl);
    backprop(params, fw, gene, dlogits, scale, *grad);
  }
  return kl;
}

int sample_from_logprobs(std::span<const double> logp, const SamplingConfig& cfg, Rng& rng) {
  const std::size_t V = logp.size();
  if (cfg.greedy) {
    return static_cast<int>(std::max_element(logp.begin(), logp.end()) - logp.begin());
  }
  std::vector<double> scaled(V);
  for (std::size_t v = 0; v < V; ++v) scaled[v] = logp[v] / cfg.temperature;
  const auto lp = log_softmax(scaled);
  std::vector<int> order(V);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return lp[static_cast<std::size_t>(a)] > lp[static_cast<std::size_t>(b)]; });
  const std::size_t k = std::min<std::size_t>(V, static_cast<std::size_t>(cfg.top_k));
  std::vector<double> probs;
  double cum = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    const double pr = std::exp(lp[static_cast<std::size_t>(order[r])]);
    probs.push_back(pr);
    cum += pr;
    if (cum >= cfg.top_p) break;
  }
  double u = rng.uniform() * cum;
  for (std::size_t r = 0; r < probs.size(); ++r) {
    if (u < probs[r]) return order[r];
    u -= probs[r];
  }
  return order[probs.size() - 1];
}

int sample_token(const PolicyParams& params, std::span<const int> context, std::span<const double> gene,
                 const SamplingConfig& cfg, Rng& rng, double* logprob) {
  const auto logp = next_logprobs(params, context, gene);
  const int tok = sample_from_logprobs(logp, cfg, rng);
  if (logprob) *logprob = logp[static_cast<std::size_t>(tok)];
  return tok;
}

}  // namespace boundrl::policy
