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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oar/attribution/importance.hpp"
#include "oar/attribution/probe.hpp"
#include "oar/attribution/scores.hpp"
#include "oar/common/error.hpp"
#include "oar/common/rng.hpp"
#include "oar/policy/policy.hpp"
#include "oar/tasks/reward.hpp"
#include "oar/tasks/vocabulary.hpp"
#include "test_support.hpp"

namespace oar::attribution {
namespace {

using policy::TokenId;

std::vector<TokenId> encode(const std::string& text) { return tasks::encode(text); }

// Probe of `response` evaluated on the rows resolved from the unperturbed response.
ProbeValue fixed_probe(const Policy& policy, std::span<const TokenId> prompt, std::span<const TokenId> response,
                       const ResolvedProbe& resolved) {
  const auto logits = policy.logits(policy::join(prompt, response));
  std::vector<double> rows;
  for (const auto r : resolved.rows) {
    const auto row = logits.row(r);
    rows.insert(rows.end(), row.begin(), row.end());
  }
  return probe_from_logits(policy, resolved, rows);
}

TEST(Probe, ResolvesRowsForEachKind) {
  const std::vector<TokenId> response = encode("ab1+2=3;<answer>13</answer><eos>");
  const std::size_t prompt_length = 5;
  const auto lt = resolve_probe({ProbeKind::kLastTokenLogits, true}, prompt_length, response);
  EXPECT_EQ(lt.rows, (std::vector<std::size_t>{prompt_length + response.size() - 1}));
  const auto as = resolve_probe({ProbeKind::kAnswerSpanMean, true}, prompt_length, response);
  ASSERT_TRUE(as.span.has_value());
  // Content "13" sits at response positions 9 and 10; rows predicting them are one earlier.
  EXPECT_EQ(as.rows, (std::vector<std::size_t>{prompt_length + 8, prompt_length + 9}));
  const auto joint = resolve_probe({ProbeKind::kAnswerSpanJoint, true}, prompt_length, response);
  EXPECT_EQ(joint.targets, (std::vector<TokenId>{tasks::digit_token(1), tasks::digit_token(3)}));
}

TEST(Probe, MissingSpanFallsBackOrThrows) {
  const std::vector<TokenId> response = encode("ab1+2=3;<eos>");
  const auto fallback = resolve_probe({ProbeKind::kAnswerSpanMean, true}, 4, response);
  EXPECT_EQ(fallback.kind, ProbeKind::kLastTokenLogits);
  EXPECT_THROW(resolve_probe({ProbeKind::kAnswerSpanMean, false}, 4, response), NoSpanError);
  EXPECT_THROW(resolve_probe({ProbeKind::kAnswerSpanJoint, false}, 4, response), NoSpanError);

  const auto policy = testing::random_policy(21);
  const std::vector<TokenId> prompt = encode("<bos>1+2=");
  const auto lt = probe_distribution(policy, prompt, response, {ProbeKind::kLastTokenLogits, true});
  const auto as = probe_distribution(policy, prompt, response, {ProbeKind::kAnswerSpanMean, true});
  EXPECT_EQ(lt.distribution->probs, as.distribution->probs);
}

TEST(Probe, SingleTokenSpanMeanIsThatRowSoftmax) {
  const auto policy = testing::random_policy(22);
  const std::vector<TokenId> prompt = encode("<bos>1+2=");
  const std::vector<TokenId> response = encode("a1+2=3;<answer>3</answer><eos>");
  const auto value = probe_distribution(policy, prompt, response, {ProbeKind::kAnswerSpanMean, true});
  const auto logits = policy.logits(policy::join(prompt, response));
  const auto span = tasks::extract_answer_span(response);
  const auto expected = policy.distribution(logits.row(prompt.size() + span->start - 1));
  for (std::size_t v = 0; v < expected.size(); ++v) {
    EXPECT_NEAR(value.distribution->probs[v], expected.probs[v], 1e-15);
  }
}

TEST(Probe, JointScoreIsMeanSpanLogLikelihood) {
  const auto& policy = testing::toy_policy();
  const auto solved = testing::toy_solved_tasks(3, 31);
  ASSERT_EQ(solved.size(), 3u);
  for (const auto& item : solved) {
    const auto value = probe_distribution(policy, item.task.prompt, item.response, {ProbeKind::kAnswerSpanJoint, true});
    const auto stats = policy::logprobs_entropy(policy, item.task.prompt, item.response);
    const auto span = tasks::extract_answer_span(item.response);
    double total = 0.0;
    for (std::size_t t = span->start; t < span->end; ++t) {
      total += stats.log_probs[t];
    }
    EXPECT_NEAR(value.score, total / static_cast<double>(span->length()), 1e-12);
  }
}

TEST(Importance, NormalizationMatchesHandComputation) {
  const double e = std::exp(1.0);
  const std::vector<double> raw = {0.0, e - 1.0, e * e - 1.0};
  const auto out = normalize_importance(raw);
  EXPECT_FALSE(out.degenerate);
  EXPECT_NEAR(out.values[0], 0.0, 1e-15);
  EXPECT_NEAR(out.values[1], 0.499999750000125, 1e-14);
  EXPECT_NEAR(out.values[2], 0.99999950000025, 1e-14);
  const auto other = normalize_importance(std::vector<double>{0.5, 3.0, 0.0, 1.25});
  const double expected[] = {0.2924810393801056, 0.999999278653, 0.0, 0.5849620787602112};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(other.values[i], expected[i], 1e-14);
  }
}

TEST(Importance, ConstantScoresAreDegenerate) {
  const auto out = normalize_importance(std::vector<double>{0.7, 0.7, 0.7});
  EXPECT_TRUE(out.degenerate);
  EXPECT_EQ(out.values, (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_THROW(normalize_importance(std::vector<double>{0.1, -0.2}), ContractViolation);
  EXPECT_THROW(normalize_importance(std::vector<double>{}), ContractViolation);
}

TEST(Importance, TargetsStopBeforeAnswerContent) {
  const auto response = encode("ab1=1;<answer>1</answer><eos>");
  const auto targets = attribution_targets(response);
  const std::vector<bool> expected = {true, true, true, true, true, true, true, false, false, false};
  EXPECT_EQ(targets, expected);
  const auto plain = attribution_targets(encode("ab1<eos>"));
  EXPECT_EQ(plain, (std::vector<bool>{true, true, true, false}));
  const auto profile = make_profile(ImportanceMethod::kRandom, ProbeKind::kLastTokenLogits, targets,
                                    {0.2, 0.4, 0.1, 0.9, 0.3, 0.5, 0.6, 0.0, 0.0, 0.0});
  EXPECT_EQ(profile.target_count(), 7u);
  EXPECT_NEAR(profile.normalized[3], 1.0, 1e-5);
  EXPECT_EQ(profile.normalized[2], 0.0);
  EXPECT_EQ(profile.normalized[8], 0.0);
}

TEST(OarP, MaskTokenAlreadyPresentScoresZero) {
  const auto policy = testing::random_policy(23);
  const std::vector<TokenId> prompt = encode("<bos>1+2=");
  std::vector<TokenId> response = encode("ab1+2=3;<answer>3</answer><eos>");
  response[1] = tasks::vocab::kPad;
  AttributionConfig config;
  const auto scores = oar_p_scores(policy, prompt, response, config);
  EXPECT_EQ(scores[1], 0.0);
  for (const double s : scores) {
    EXPECT_GE(s, 0.0);
  }
}

TEST(OarP, BatchedEqualsSerialBitForBit) {
  const auto& policy = testing::toy_policy();
  const auto solved = testing::toy_solved_tasks(8, 41);
  for (const auto kind : {ProbeKind::kLastTokenLogits, ProbeKind::kAnswerSpanMean, ProbeKind::kAnswerSpanJoint}) {
    for (const auto& item : solved) {
      AttributionConfig serial;
      serial.probe.kind = kind;
      serial.serial = true;
      const auto reference = oar_p_scores(policy, item.task.prompt, item.response, serial);
      for (const std::size_t budget : {1, 3, 32}) {
        AttributionConfig batched = serial;
        batched.serial = false;
        batched.batch_budget = budget;
        EXPECT_EQ(oar_p_scores(policy, item.task.prompt, item.response, batched), reference)
            << to_string(kind) << " budget " << budget;
      }
    }
  }
}

TEST(OarP, ScoresEqualProbeKlOfMaskedSequence) {
  const auto& policy = testing::toy_policy();
  const auto solved = testing::toy_solved_tasks(2, 43);
  for (const auto& item : solved) {
    AttributionConfig config;
    const auto scores = oar_p_scores(policy, item.task.prompt, item.response, config);
    const auto resolved = resolve_probe(config.probe, item.task.prompt.size(), item.response);
    const auto clean = fixed_probe(policy, item.task.prompt, item.response, resolved);
    const auto targets = attribution_targets(item.response);
    for (std::size_t t = 0; t < item.response.size(); ++t) {
      if (!targets[t]) {
        EXPECT_EQ(scores[t], 0.0);
        continue;
      }
      auto masked = item.response;
      masked[t] = policy.config().pad_id;
      const auto perturbed = fixed_probe(policy, item.task.prompt, masked, resolved);
      EXPECT_NEAR(scores[t], std::max(0.0, policy::kl_divergence(*clean.distribution, *perturbed.distribution)), 1e-12);
    }
  }
}

TEST(OarP, ResultDigitOutranksFillerOnTrainedModel) {
  const auto& policy = testing::toy_policy();
  std::size_t wins = 0;
  std::size_t traces = 0;
  for (std::uint64_t i = 0; traces < 100 && i < 2000; ++i) {
    const auto task = tasks::stream_task(51, i, 1, 2, testing::toy_task_config());
    auto rng = make_rng(51, {i});
    const auto sampled = policy::sample(policy, task.prompt, 1.0, 40, policy::DecodeMode::kStochastic, rng);
    if (tasks::compute_reward(sampled.tokens, task).accuracy != 1.0) {
      continue;
    }
    const auto& response = sampled.tokens;
    const auto span = tasks::extract_answer_span(response);
    // Final step line: fillers, operands, '=', result digits, ';' just before the answer tag.
    const std::size_t semicolon = span->open_tag() - 1;
    std::size_t equals = semicolon;
    while (response[equals] != tasks::vocab::kEquals) {
      --equals;
    }
    std::size_t line_start = equals;
    while (line_start > 0 && response[line_start - 1] != tasks::vocab::kSemicolon) {
      --line_start;
    }
    if (!tasks::is_filler(response[line_start])) {
      continue;
    }
    ++traces;
    const auto scores = oar_p_scores(policy, task.prompt, response, AttributionConfig{});
    double digit = 0.0;
    for (std::size_t t = equals + 1; t < semicolon; ++t) {
      digit = std::max(digit, scores[t]);
    }
    wins += digit > scores[line_start] ? 1 : 0;
  }
  ASSERT_EQ(traces, 100u);
  EXPECT_GE(wins, 90u);
}

TEST(OarP, PinskerBoundHoldsOnRandomEvents) {
  const auto& policy = testing::toy_policy();
  const auto solved = testing::toy_solved_tasks(40, 61);
  Rng rng(61);
  std::bernoulli_distribution coin(0.5);
  std::size_t checked = 0;
  for (const auto& item : solved) {
    const auto resolved = resolve_probe({}, item.task.prompt.size(), item.response);
    const auto clean = fixed_probe(policy, item.task.prompt, item.response, resolved);
    const auto targets = attribution_targets(item.response);
    for (std::size_t t = 0; t < item.response.size() && checked < 1000; ++t) {
      if (!targets[t]) {
        continue;
      }
      auto masked = item.response;
      masked[t] = policy.config().pad_id;
      const auto perturbed = fixed_probe(policy, item.task.prompt, masked, resolved);
      const double kl = std::max(0.0, policy::kl_divergence(*clean.distribution, *perturbed.distribution));
      for (int s = 0; s < 5 && checked < 1000; ++s, ++checked) {
        double p = 0.0;
        double q = 0.0;
        for (std::size_t v = 0; v < clean.distribution->size(); ++v) {
          if (coin(rng)) {
            p += clean.distribution->probs[v];
            q += perturbed.distribution->probs[v];
          }
        }
        ASSERT_LE(std::abs(p - q), std::sqrt(kl / 2.0) + 1e-9);
      }
    }
  }
  EXPECT_EQ(checked, 1000u);
}

TEST(OarG, NoiseProducesPositiveObjective) {
  const auto& policy = testing::toy_policy();
  const auto item = testing::toy_solved_tasks(1, 71).front();
  const auto full = policy::join(item.task.prompt, item.response);
  AttributionConfig config;
  Rng rng(3);
  const auto sd = self_distillation(policy, item.task.prompt, item.response, config.probe, nullptr,
                                    noise_sigma(policy, full, config), rng);
  EXPECT_GT(sd.objective, 0.0);
}

TEST(OarG, VanishingNoiseGivesVanishingScores) {
  const auto& policy = testing::toy_policy();
  const auto item = testing::toy_solved_tasks(1, 72).front();
  AttributionConfig config;
  config.sigma_absolute = 1e-12;
  for (const double s : oar_g_scores(policy, item.task.prompt, item.response, config, 5)) {
    EXPECT_LT(s, 1e-6);
  }
}

TEST(OarG, ZeroEmbeddingRowScoresZero) {
  const auto& policy = testing::toy_policy();
  const auto item = testing::toy_solved_tasks(1, 73).front();
  const auto full = policy::join(item.task.prompt, item.response);
  auto embeddings = policy.token_embeddings(full);
  const std::size_t row = item.task.prompt.size() + 2;
  for (auto& v : embeddings.rows.row(row)) {
    v = 0.0;
  }
  Rng rng(4);
  const auto sd = self_distillation(policy, item.task.prompt, item.response, {}, &embeddings, 0.05, rng);
  double inner = 0.0;
  for (std::size_t k = 0; k < policy.config().d_model; ++k) {
    inner += sd.gradient.at(row, k) * sd.embeddings.at(row, k);
  }
  EXPECT_EQ(inner, 0.0);
}

TEST(OarG, DirectionalFiniteDifferenceMatchesGradient) {
  const auto& policy = testing::toy_policy();
  const auto solved = testing::toy_solved_tasks(20, 81);
  ASSERT_EQ(solved.size(), 20u);
  AttributionConfig config;
  Rng pick(81);
  for (std::size_t i = 0; i < solved.size(); ++i) {
    const auto& item = solved[i];
    const auto full = policy::join(item.task.prompt, item.response);
    const double sigma = noise_sigma(policy, full, config);
    const auto base = policy.token_embeddings(full);
    const auto targets = attribution_targets(item.response);
    std::vector<std::size_t> candidates;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (targets[t]) {
        candidates.push_back(t);
      }
    }
    const std::size_t t = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(pick)];
    const std::size_t row = item.task.prompt.size() + t;

    auto objective = [&](double step, policy::Tensor* gradient) {
      auto shifted = base;
      double norm = 0.0;
      for (const double v : base.rows.row(row)) {
        norm += v * v;
      }
      norm = std::sqrt(norm);
      for (std::size_t k = 0; k < policy.config().d_model; ++k) {
        shifted.rows.at(row, k) += step * base.rows.at(row, k) / norm;
      }
      auto rng = make_rng(900, {i});
      const auto sd = self_distillation(policy, item.task.prompt, item.response, config.probe, &shifted, sigma, rng);
      if (gradient != nullptr) {
        *gradient = sd.gradient;
      }
      return std::pair{sd.objective, norm};
    };
    policy::Tensor gradient;
    const auto [j0, norm] = objective(0.0, &gradient);
    const double h = 1e-5;
    const double finite = (objective(h, nullptr).first - objective(-h, nullptr).first) / 2.0;
    double inner = 0.0;
    for (std::size_t k = 0; k < policy.config().d_model; ++k) {
      inner += gradient.at(row, k) * base.rows.at(row, k);
    }
    const double predicted = inner * h / norm;
    EXPECT_LT(std::abs(finite - predicted), 0.1 * std::abs(predicted)) << "trajectory " << i << " position " << t;
    EXPECT_GT(j0, 0.0);
  }
}

TEST(OarG, DeterministicGivenSeed) {
  const auto& policy = testing::toy_policy();
  const auto item = testing::toy_solved_tasks(1, 74).front();
  AttributionConfig config;
  const auto a = oar_g_scores(policy, item.task.prompt, item.response, config, 9);
  const auto b = oar_g_scores(policy, item.task.prompt, item.response, config, 9);
  EXPECT_EQ(a, b);
  config.repeats = 3;
  const auto averaged = oar_g_scores(policy, item.task.prompt, item.response, config, 9);
  EXPECT_NE(averaged, a);
}

TEST(Entropy, ScoresMatchPolicyEntropy) {
  const auto policy = testing::random_policy(24);
  const std::vector<TokenId> prompt = encode("<bos>3*2=");
  const std::vector<TokenId> response = encode("ab3*2=6;<answer>6</answer><eos>");
  const auto scores = entropy_scores(policy, prompt, response);
  const auto stats = policy::logprobs_entropy(policy, prompt, response);
  EXPECT_EQ(scores, stats.entropy);
}

TEST(Entropy, UniformModelGivesLogOfAllowedVocabulary) {
  auto policy = testing::random_policy(25, 8, 1, 32);
  for (auto& v : policy.parameters().back()->data()) {
    v = 0.0;
  }
  const std::vector<TokenId> prompt = encode("<bos>3*2=");
  const std::vector<TokenId> response = encode("ab3*2=6;<eos>");
  // PAD and BOS are never produced, so the uniform support has 28 tokens.
  for (const double s : entropy_scores(policy, prompt, response)) {
    EXPECT_NEAR(s, std::log(28.0), 1e-12);
  }
}

TEST(Random, SeededUniformScores) {
  EXPECT_EQ(random_scores(10, 5), random_scores(10, 5));
  EXPECT_NE(random_scores(10, 5), random_scores(10, 6));
  const auto many = random_scores(100000, 11);
  double total = 0.0;
  for (const double v : many) {
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    total += v;
  }
  const double mean = total / static_cast<double>(many.size());
  EXPECT_GE(mean, 0.497);
  EXPECT_LE(mean, 0.503);
}

TEST(Profile, ComputeProfileNormalizesTargetsOnly) {
  const auto& policy = testing::toy_policy();
  const auto item = testing::toy_solved_tasks(1, 75).front();
  for (const auto method :
       {ImportanceMethod::kOarP, ImportanceMethod::kOarG, ImportanceMethod::kEntropy, ImportanceMethod::kRandom}) {
    const auto profile = compute_profile(method, policy, item.task.prompt, item.response, {}, 3);
    ASSERT_EQ(profile.size(), item.response.size());
    std::vector<double> target_raw;
    for (std::size_t t = 0; t < profile.size(); ++t) {
      ASSERT_GE(profile.raw[t], 0.0);
      if (profile.target[t]) {
        target_raw.push_back(profile.raw[t]);
      } else {
        EXPECT_EQ(profile.normalized[t], 0.0);
      }
    }
    const auto expected = normalize_importance(target_raw);
    EXPECT_EQ(profile.degenerate, expected.degenerate);
    std::size_t k = 0;
    for (std::size_t t = 0; t < profile.size(); ++t) {
      if (profile.target[t]) {
        EXPECT_EQ(profile.normalized[t], expected.values[k++]) << to_string(method);
      }
    }
  }
}

}  // namespace
}  // namespace oar::attribution
