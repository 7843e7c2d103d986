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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"
#include "core/policy.hpp"
#include "core/rng.hpp"

using boundrl::Error;
using boundrl::Rng;
namespace policy = boundrl::policy;

namespace {

struct Case {
  policy::PolicyParams params;
  std::vector<int> context;
  std::vector<double> gene;
  int target = 0;
};

Case random_case(Rng& rng) {
  Case c;
  const int vocab = 4 + static_cast<int>(rng.below(29));
  const int hidden = 1 + static_cast<int>(rng.below(8));
  const int gene_dim = 1 + static_cast<int>(rng.below(8));
  const int window = 1 + static_cast<int>(rng.below(5));
  c.params = policy::PolicyParams::random(vocab, hidden, gene_dim, window, rng, 0.2 + rng.uniform());
  for (auto& x : c.params.b) x = rng.normal();
  const std::size_t len = rng.below(7);
  for (std::size_t i = 0; i < len; ++i) c.context.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(vocab))));
  for (int i = 0; i < gene_dim; ++i) c.gene.push_back(rng.normal());
  c.target = static_cast<int>(rng.below(static_cast<std::uint64_t>(vocab)));
  return c;
}

double logprob_of(const policy::PolicyParams& p, const Case& c) {
  return policy::next_logprobs(p, c.context, c.gene)[static_cast<std::size_t>(c.target)];
}

// Components below 1e-5 are compared on an absolute scale: central
// differences carry about 1e-10 of rounding noise at eps = 1e-5.
double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-5});
}

}  // namespace

TEST_CASE("zero parameters give the uniform distribution") {
  const auto p = policy::PolicyParams::zeros(32, 16, 8, 4);
  const std::vector<int> ctx = {1, 5, 9};
  const std::vector<double> gene(8, 1.0);
  for (double lp : policy::next_logprobs(p, ctx, gene)) CHECK(lp == doctest::Approx(-std::log(32.0)).epsilon(1e-14));
  const auto g = policy::grad_logprob(p, ctx, gene, 7);
  for (int v = 0; v < 32; ++v) {
    CHECK(g.b[static_cast<std::size_t>(v)] == doctest::Approx((v == 7 ? 1.0 : 0.0) - 1.0 / 32.0).epsilon(1e-14));
  }
}

TEST_CASE("gene ablation is exact") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_case(rng);
    std::fill(c.gene.begin(), c.gene.end(), 0.0);
    const auto before = policy::next_logprobs(c.params, c.context, c.gene);
    auto changed = c.params;
    for (auto& w : changed.W_g) w = rng.normal() * 100.0;
    CHECK(policy::next_logprobs(changed, c.context, c.gene) == before);
    const auto g = policy::grad_logprob(c.params, c.context, c.gene, c.target);
    for (double x : g.W_g) CHECK(x == 0.0);
  }
  Rng rng2(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_case(rng2);
    auto probe = c.params;
    const std::size_t j = rng2.below(probe.W_g.size());
    probe.W_g[j] += 0.5;
    const std::size_t col = j % static_cast<std::size_t>(c.params.gene_dim);
    const bool moves = policy::next_logprobs(probe, c.context, c.gene) != policy::next_logprobs(c.params, c.context, c.gene);
    CHECK(moves == (c.gene[col] != 0.0));
  }
}

TEST_CASE("log-probability gradient matches central finite differences") {
  Rng rng(2025);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_case(rng);
    const auto g = policy::grad_logprob(c.params, c.context, c.gene, c.target);
    auto p = c.params;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double x = p.flat(i);
      p.flat(i) = x + 1e-5;
      const double up = logprob_of(p, c);
      p.flat(i) = x - 1e-5;
      const double down = logprob_of(p, c);
      p.flat(i) = x;
      worst = std::max(worst, relative_error(g.flat(i), (up - down) / 2e-5));
    }
    policy::Gradient acc = c.params.zeros_like();
    const double lp = policy::accumulate_logprob_grad(c.params, c.context, c.gene, c.target, 2.0, acc);
    CHECK(lp == logprob_of(c.params, c));
    for (std::size_t i = 0; i < acc.size(); ++i) CHECK(acc.flat(i) == doctest::Approx(2.0 * g.flat(i)).epsilon(1e-12));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("KL divergence and its gradient") {
  Rng rng(31);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_case(rng);
    CHECK(policy::kl_divergence(c.params, c.params, c.context, c.gene) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    auto ref = c.params;
    for (auto& x : ref.b) x += rng.normal();
    const double kl = policy::kl_divergence(c.params, ref, c.context, c.gene);
    CHECK(kl >= 0.0);
    const auto lp = policy::next_logprobs(c.params, c.context, c.gene);
    const auto lq = policy::next_logprobs(ref, c.context, c.gene);
    double direct = 0.0;
    for (std::size_t v = 0; v < lp.size(); ++v) direct += std::exp(lp[v]) * (lp[v] - lq[v]);
    CHECK(kl == doctest::Approx(direct).epsilon(1e-10));
    policy::Gradient g = c.params.zeros_like();
    (void)policy::kl_divergence(c.params, ref, c.context, c.gene, 1.0, &g);
    auto p = c.params;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double x = p.flat(i);
      p.flat(i) = x + 1e-5;
      const double up = policy::kl_divergence(p, ref, c.context, c.gene);
      p.flat(i) = x - 1e-5;
      const double down = policy::kl_divergence(p, ref, c.context, c.gene);
      p.flat(i) = x;
      worst = std::max(worst, relative_error(g.flat(i), (up - down) / 2e-5));
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("log-softmax is stable for large logits") {
  const auto lp = policy::log_softmax(std::vector<double>{1000.0, -1000.0, 999.0});
  for (double x : lp) CHECK(std::isfinite(x));
  CHECK(std::exp(lp[0]) + std::exp(lp[1]) + std::exp(lp[2]) == doctest::Approx(1.0).epsilon(1e-12));
  auto p = policy::PolicyParams::zeros(4, 2, 1, 2);
  p.b = {1000.0, -1000.0, 0.0, 500.0};
  for (double x : policy::next_logprobs(p, std::vector<int>{}, std::vector<double>{0.0})) CHECK_FALSE(std::isnan(x));
}

TEST_CASE("sampling modes") {
  const std::vector<double> logp = {std::log(0.2), std::log(0.5), std::log(0.3)};
  Rng rng(17);
  policy::SamplingConfig greedy;
  greedy.greedy = true;
  policy::SamplingConfig top1;
  top1.top_k = 1;
  top1.top_p = 1.0;
  for (int i = 0; i < 100; ++i) {
    CHECK(policy::sample_from_logprobs(logp, greedy, rng) == 1);
    CHECK(policy::sample_from_logprobs(logp, top1, rng) == 1);
  }

  policy::SamplingConfig full;
  full.top_p = 1.0;
  const int n = 100000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(policy::sample_from_logprobs(logp, full, rng))];
  const double truth[] = {0.2, 0.5, 0.3};
  for (int v = 0; v < 3; ++v) {
    const double sigma = std::sqrt(n * truth[v] * (1.0 - truth[v]));
    CHECK(std::abs(counts[static_cast<std::size_t>(v)] - n * truth[v]) <= 3.0 * sigma);
  }

  policy::SamplingConfig nucleus;
  nucleus.top_p = 0.7;
  std::vector<int> kept(3, 0);
  for (int i = 0; i < 20000; ++i) ++kept[static_cast<std::size_t>(policy::sample_from_logprobs(logp, nucleus, rng))];
  CHECK(kept[0] == 0);
  CHECK(kept[1] > 0);
  CHECK(kept[2] > 0);

  policy::SamplingConfig k2;
  k2.top_k = 2;
  k2.top_p = 1.0;
  std::vector<int> top2(3, 0);
  for (int i = 0; i < 20000; ++i) ++top2[static_cast<std::size_t>(policy::sample_from_logprobs(logp, k2, rng))];
  CHECK(top2[0] == 0);
  CHECK(std::abs(top2[1] / 20000.0 - 0.625) < 0.02);
}

TEST_CASE("sample_token reports the untempered log-probability") {
  Rng rng(8);
  const auto c = random_case(rng);
  policy::SamplingConfig cfg;
  cfg.temperature = 0.5;
  for (int i = 0; i < 50; ++i) {
    double lp = 0.0;
    const int t = policy::sample_token(c.params, c.context, c.gene, cfg, rng, &lp);
    CHECK(lp == policy::next_logprobs(c.params, c.context, c.gene)[static_cast<std::size_t>(t)]);
  }
}

TEST_CASE("teacher-forced passes are counted and consistent with logprobs") {
  Rng rng(6);
  const auto c = random_case(rng);
  std::vector<int> tokens = c.context;
  tokens.push_back(c.target);
  std::vector<std::uint8_t> select(tokens.size(), 0);
  select.back() = 1;
  policy::reset_teacher_forced_pass_count();
  const auto lp = policy::teacher_forced_logprobs(c.params, tokens, c.gene, select);
  CHECK(policy::teacher_forced_pass_count() == 1);
  CHECK(lp.back() == doctest::Approx(logprob_of(c.params, c)).epsilon(1e-12));
  for (std::size_t i = 0; i + 1 < lp.size(); ++i) CHECK(lp[i] == 0.0);
  const auto rows = policy::logprobs(c.params, tokens, c.gene);
  CHECK(rows.size() == tokens.size());
}

TEST_CASE("parameter serialization and validation") {
  Rng rng(1);
  const auto p = policy::PolicyParams::random(32, 16, 8, 4, rng, 0.1);
  const auto back = policy::PolicyParams::from_json(p.to_json());
  CHECK(back == p);
  auto bad = p;
  bad.b.pop_back();
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = p;
  bad.E[0] = std::nan("");
  CHECK_FALSE(bad.all_finite());
  CHECK_THROWS_AS(bad.validate(), Error);
  policy::SamplingConfig cfg;
  cfg.temperature = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
