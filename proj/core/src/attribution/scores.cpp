// Copyright 2026 The oarlab Authors
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

#include "oar/attribution/scores.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "oar/common/error.hpp"
#include "oar/numerics/ops.hpp"

namespace oar::attribution {

namespace {

using numerics::Graph;
using numerics::Var;

std::vector<double> gather_rows(const policy::Tensor& logits, std::span<const std::size_t> rows) {
  std::vector<double> out;
  for (const auto r : rows) {
    const auto row = logits.row(r);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

double probe_shift(const ProbeValue& clean, const ProbeValue& perturbed) {
  if (clean.distribution) {
    return std::max(0.0, policy::kl_divergence(*clean.distribution, *perturbed.distribution));
  }
  return std::max(0.0, clean.score - perturbed.score);
}

std::vector<double> oar_p_serial(const Policy& policy, std::span<const TokenId> prompt,
                                 std::span<const TokenId> response, const ResolvedProbe& probe,
                                 const std::vector<bool>& targets) {
  auto full = policy::join(prompt, response);
  const ProbeValue clean = probe_from_logits(policy, probe, gather_rows(policy.logits(full), probe.rows));
  std::vector<double> scores(response.size(), 0.0);
  for (std::size_t t = 0; t < response.size(); ++t) {
    if (!targets[t]) {
      continue;
    }
    auto perturbed = full;
    perturbed[prompt.size() + t] = policy.config().pad_id;
    const ProbeValue value = probe_from_logits(policy, probe, gather_rows(policy.logits(perturbed), probe.rows));
    scores[t] = probe_shift(clean, value);
  }
  return scores;
}

std::vector<double> oar_p_batched(const Policy& policy, std::span<const TokenId> prompt,
                                  std::span<const TokenId> response, const ResolvedProbe& probe,
                                  const std::vector<bool>& targets, std::size_t batch_budget) {
  const auto full = policy::join(prompt, response);
  const std::size_t d = policy.config().d_model;
  const TokenId mask = policy.config().pad_id;

  policy::DecodeState clean_state;
  policy::Lane clean;
  clean.state = &clean_state;
  clean.tokens = full;
  clean.logit_rows = probe.rows;
  policy.advance(std::span<policy::Lane>(&clean, 1));
  const ProbeValue clean_value = probe_from_logits(policy, probe, clean.logits);

  std::vector<std::size_t> pending;
  for (std::size_t t = 0; t < response.size(); ++t) {
    if (targets[t]) {
      pending.push_back(t);
    }
  }
  std::vector<double> scores(response.size(), 0.0);
  for (std::size_t begin = 0; begin < pending.size(); begin += batch_budget) {
    const std::size_t end = std::min(pending.size(), begin + batch_budget);
    const std::size_t count = end - begin;
    std::vector<policy::DecodeState> states(count);
    std::vector<std::vector<TokenId>> suffixes(count);
    std::vector<policy::Lane> lanes(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t q = prompt.size() + pending[begin + i];
      states[i] = clean_state.prefix(q, d);
      suffixes[i].assign(full.begin() + static_cast<std::ptrdiff_t>(q), full.end());
      suffixes[i][0] = mask;
      lanes[i].state = &states[i];
      lanes[i].tokens = suffixes[i];
      for (const auto r : probe.rows) {
        require(r >= q, "probe row precedes the perturbed position");
        lanes[i].logit_rows.push_back(r - q);
      }
    }
    policy.advance(lanes);
    for (std::size_t i = 0; i < count; ++i) {
      scores[pending[begin + i]] = probe_shift(clean_value, probe_from_logits(policy, probe, lanes[i].logits));
    }
  }
  return scores;
}

}  // namespace

std::vector<double> oar_p_scores(const Policy& policy, std::span<const TokenId> prompt,
                                 std::span<const TokenId> response, const AttributionConfig& config) {
  require(!response.empty(), "oar_p_scores: empty response");
  require(config.batch_budget >= 1, "oar_p_scores: batch_budget must be positive");
  const ResolvedProbe probe = resolve_probe(config.probe, prompt.size(), response);
  const auto targets = attribution_targets(response);
  if (config.serial) {
    return oar_p_serial(policy, prompt, response, probe, targets);
  }
  return oar_p_batched(policy, prompt, response, probe, targets, config.batch_budget);
}

SelfDistillation self_distillation(const Policy& policy, std::span<const TokenId> prompt,
                                   std::span<const TokenId> response, const OutcomeProbe& probe,
                                   const policy::SequenceEmbeddings* embeddings, double sigma, Rng& rng) {
  require(!response.empty(), "self_distillation: empty response");
  require(sigma >= 0.0 && std::isfinite(sigma), "self_distillation: sigma must be finite and non-negative");
  const ResolvedProbe resolved = resolve_probe(probe, prompt.size(), response);
  const auto full = policy::join(prompt, response);

  policy::DecodeState teacher_state;
  policy::Lane teacher;
  teacher.state = &teacher_state;
  teacher.tokens = full;
  teacher.logit_rows = resolved.rows;
  policy.advance(std::span<policy::Lane>(&teacher, 1));
  const ProbeValue teacher_value = probe_from_logits(policy, resolved, teacher.logits);

  const auto targets = attribution_targets(response);
  policy::ForwardOptions options;
  options.embedding_override = embeddings;
  options.embeddings_require_grad = true;
  options.parameters_require_grad = false;
  options.noise_sigma = sigma;
  options.rng = &rng;
  options.noise_mask.assign(full.size(), false);
  for (std::size_t t = 0; t < response.size(); ++t) {
    options.noise_mask[prompt.size() + t] = targets[t];
  }
  options.logit_rows = resolved.rows;

  Graph graph;
  const auto student = policy.forward(graph, full, options);
  Var objective;
  switch (resolved.kind) {
    case ProbeKind::kLastTokenLogits:
    case ProbeKind::kAnswerSpanMean: {
      const Var outcome = resolved.kind == ProbeKind::kLastTokenLogits ? student.logits : numerics::mean_rows(student.logits);
      const Var log_q = numerics::log_softmax(outcome, policy.output_mask());
      const Var log_p = graph.constant(policy::Tensor::vector(teacher_value.distribution->log_probs));
      objective = numerics::kl_divergence(log_p, log_q);
      break;
    }
    case ProbeKind::kAnswerSpanJoint: {
      const std::vector<std::size_t> picks(resolved.targets.begin(), resolved.targets.end());
      const Var score = numerics::mean(numerics::pick(numerics::log_softmax(student.logits, policy.output_mask()), picks));
      const Var drop = numerics::sub(graph.constant(policy::Tensor::scalar(teacher_value.score)), score);
      objective = numerics::scale(numerics::mul(drop, drop), 0.5);
      break;
    }
  }
  graph.backward(objective);

  SelfDistillation out;
  out.objective = objective.value().item();
  out.embeddings = student.embeddings.value();
  out.gradient = policy::Tensor(out.embeddings.shape());
  const auto grad = student.embeddings.grad();
  std::copy(grad.begin(), grad.end(), out.gradient.data().begin());
  out.sigma = sigma;
  return out;
}

double noise_sigma(const Policy& policy, std::span<const TokenId> full_sequence, const AttributionConfig& config) {
  if (config.sigma_absolute > 0.0) {
    return config.sigma_absolute;
  }
  require(config.sigma_scale > 0.0, "OAR-G needs a positive sigma_scale or sigma_absolute");
  const auto rows = policy.token_embeddings(full_sequence).rows;
  double sum_sq = 0.0;
  for (const double v : rows.data()) {
    sum_sq += v * v;
  }
  return config.sigma_scale * std::sqrt(sum_sq / static_cast<double>(rows.size()));
}

std::vector<double> oar_g_scores(const Policy& policy, std::span<const TokenId> prompt,
                                 std::span<const TokenId> response, const AttributionConfig& config,
                                 std::uint64_t seed) {
  require(!response.empty(), "oar_g_scores: empty response");
  require(config.repeats >= 1, "oar_g_scores: repeats must be positive");
  const auto targets = attribution_targets(response);
  const double sigma = noise_sigma(policy, policy::join(prompt, response), config);
  const std::size_t d = policy.config().d_model;
  std::vector<double> scores(response.size(), 0.0);
  for (std::size_t r = 0; r < config.repeats; ++r) {
    Rng rng = make_rng(seed, {r});
    const auto sd = self_distillation(policy, prompt, response, config.probe, nullptr, sigma, rng);
    for (std::size_t t = 0; t < response.size(); ++t) {
      if (!targets[t]) {
        continue;
      }
      const std::size_t row = prompt.size() + t;
      double inner = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        inner += sd.gradient.at(row, j) * sd.embeddings.at(row, j);
      }
      scores[t] += std::abs(inner);
    }
  }
  if (config.repeats > 1) {
    for (auto& s : scores) {
      s /= static_cast<double>(config.repeats);
    }
  }
  return scores;
}

std::vector<double> entropy_scores(const Policy& policy, std::span<const TokenId> prompt,
                                   std::span<const TokenId> response) {
  return policy::logprobs_entropy(policy, prompt, response).entropy;
}

std::vector<double> random_scores(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> out(count);
  for (auto& v : out) {
    v = uniform(rng);
  }
  return out;
}

ImportanceProfile compute_profile(ImportanceMethod method, const Policy& policy, std::span<const TokenId> prompt,
                                  std::span<const TokenId> response, const AttributionConfig& config,
                                  std::uint64_t seed) {
  require(!response.empty(), "compute_profile: empty response");
  std::vector<double> raw;
  ProbeKind kind = config.probe.kind;
  switch (method) {
    case ImportanceMethod::kOarP:
      kind = resolve_probe(config.probe, prompt.size(), response).kind;
      raw = oar_p_scores(policy, prompt, response, config);
      break;
    case ImportanceMethod::kOarG:
      kind = resolve_probe(config.probe, prompt.size(), response).kind;
      raw = oar_g_scores(policy, prompt, response, config, seed);
      break;
    case ImportanceMethod::kEntropy:
      raw = entropy_scores(policy, prompt, response);
      break;
    case ImportanceMethod::kRandom:
      raw = random_scores(response.size(), seed);
      break;
  }
  return make_profile(method, kind, attribution_targets(response), std::move(raw));
}

}  // namespace oar::attribution
