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

#include "oar/evaluation/oracle.hpp"

#include <algorithm>

#include "oar/attribution/importance.hpp"
#include "oar/common/error.hpp"

namespace oar::evaluation {

namespace {

bool is_correct(std::span<const TokenId> response, const tasks::TaskInstance& task, double format_weight) {
  return tasks::compute_reward(response, task, format_weight).accuracy == 1.0;
}

OracleLabels prepare(std::span<const TokenId> response, const tasks::TaskInstance& task, const OracleConfig& config) {
  require(!response.empty(), "oracle_label: empty response");
  OracleLabels labels;
  const auto targets = attribution::attribution_targets(response);
  labels.labeled.assign(targets.begin(), targets.end());
  labels.causal.assign(response.size(), 0);
  labels.replacement.assign(response.size(), 0);
  labels.redecoded_correct.assign(response.size(), 0);
  labels.original_correct = is_correct(response, task, config.format_weight);
  return labels;
}

/// The second most probable token when `original` is the mode, otherwise the
/// mode itself: the most probable token that differs from `original`.
TokenId alternative_token(const policy::TokenDistribution& dist, TokenId original) {
  const std::size_t first = dist.argmax();
  return static_cast<TokenId>(first == original ? dist.second_argmax() : first);
}

void record(OracleLabels& labels, std::size_t t, TokenId original, TokenId replacement, bool correct) {
  require(replacement != original, "oracle replacement equals the original token");
  labels.replacement[t] = replacement;
  labels.redecoded_correct[t] = correct ? 1 : 0;
  labels.causal[t] = correct != labels.original_correct ? 1 : 0;
}

}  // namespace

std::size_t OracleLabels::causal_count() const {
  return static_cast<std::size_t>(std::count(causal.begin(), causal.end(), std::uint8_t{1}));
}

OracleLabels oracle_label(const Policy& policy, const tasks::TaskInstance& task, std::span<const TokenId> response,
                          const OracleConfig& config) {
  OracleLabels labels = prepare(response, task, config);
  const std::size_t prompt_length = task.prompt.size();
  const std::size_t d = policy.config().d_model;
  const auto full = policy::join(task.prompt, response);

  policy::DecodeState clean_state;
  policy::Lane clean;
  clean.state = &clean_state;
  clean.tokens = full;
  for (std::size_t t = 0; t < response.size(); ++t) {
    clean.logit_rows.push_back(prompt_length + t - 1);
  }
  policy.advance(std::span<policy::Lane>(&clean, 1));
  const std::size_t vocab = policy.config().vocab_size;

  for (std::size_t t = 0; t < response.size(); ++t) {
    if (labels.labeled[t] == 0) {
      continue;
    }
    const auto dist = policy.distribution(std::span<const double>(clean.logits).subspan(t * vocab, vocab));
    const TokenId replacement = alternative_token(dist, response[t]);
    policy::Generation generation;
    generation.tokens.assign(response.begin(), response.begin() + static_cast<std::ptrdiff_t>(t));
    generation.tokens.push_back(replacement);
    const bool stop = replacement == policy.config().eos_id || t + 1 >= config.max_new_tokens ||
                      prompt_length + t + 1 >= policy.config().max_seq_len;
    if (!stop) {
      policy::DecodeState state = clean_state.prefix(prompt_length + t, d);
      policy::Lane lane;
      lane.state = &state;
      lane.tokens = std::span<const TokenId>(&replacement, 1);
      lane.logit_rows = {0};
      policy.advance(std::span<policy::Lane>(&lane, 1));
      policy::continue_generation(policy, state, std::move(lane.logits), 1.0, config.max_new_tokens - t - 1,
                                  policy::DecodeMode::kGreedy, nullptr, generation);
    }
    record(labels, t, response[t], replacement, is_correct(generation.tokens, task, config.format_weight));
  }
  return labels;
}

OracleLabels oracle_label_reference(const Policy& policy, const tasks::TaskInstance& task,
                                    std::span<const TokenId> response, const OracleConfig& config) {
  OracleLabels labels = prepare(response, task, config);
  Rng unused(0);
  for (std::size_t t = 0; t < response.size(); ++t) {
    if (labels.labeled[t] == 0) {
      continue;
    }
    std::vector<TokenId> context = policy::join(task.prompt, response.first(t));
    const auto logits = policy.logits(context);
    const auto dist = policy.distribution(logits.row(context.size() - 1));
    const TokenId replacement = alternative_token(dist, response[t]);
    std::vector<TokenId> redecoded(response.begin(), response.begin() + static_cast<std::ptrdiff_t>(t));
    redecoded.push_back(replacement);
    context.push_back(replacement);
    if (replacement != policy.config().eos_id && t + 1 < config.max_new_tokens &&
        context.size() < policy.config().max_seq_len) {
      const auto rest = policy::sample(policy, context, 1.0, config.max_new_tokens - t - 1,
                                       policy::DecodeMode::kGreedy, unused);
      redecoded.insert(redecoded.end(), rest.tokens.begin(), rest.tokens.end());
    }
    record(labels, t, response[t], replacement, is_correct(redecoded, task, config.format_weight));
  }
  return labels;
}

}  // namespace oar::evaluation
