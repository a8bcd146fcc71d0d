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

#include "oar/attribution/importance.hpp"
#include "oar/common/error.hpp"
#include "oar/evaluation/oracle.hpp"
#include "oar/evaluation/recall.hpp"
#include "oar/evaluation/timing.hpp"
#include "oar/evaluation/variance.hpp"
#include "oar/trainer/rollout.hpp"
#include "test_support.hpp"

namespace oar::evaluation {
namespace {

OracleLabels labels_of(std::vector<std::uint8_t> labeled, std::vector<std::uint8_t> causal) {
  OracleLabels out;
  out.labeled = std::move(labeled);
  out.causal = std::move(causal);
  out.replacement.assign(out.labeled.size(), 0);
  out.redecoded_correct.assign(out.labeled.size(), 0);
  out.original_correct = true;
  return out;
}

attribution::ImportanceProfile profile_of(const std::vector<std::uint8_t>& labeled, std::vector<double> raw) {
  return attribution::make_profile(attribution::ImportanceMethod::kOarP, attribution::ProbeKind::kAnswerSpanMean,
                                   std::vector<bool>(labeled.begin(), labeled.end()), std::move(raw));
}

TEST(Oracle, FastPathMatchesReference) {
  const auto& policy = testing::toy_policy();
  OracleConfig config;
  config.max_new_tokens = 40;
  for (const auto& item : testing::toy_solved_tasks(4, 101)) {
    const auto fast = oracle_label(policy, item.task, item.response, config);
    const auto reference = oracle_label_reference(policy, item.task, item.response, config);
    EXPECT_TRUE(fast.original_correct);
    EXPECT_EQ(fast.labeled, reference.labeled);
    EXPECT_EQ(fast.causal, reference.causal);
    EXPECT_EQ(fast.replacement, reference.replacement);
    EXPECT_EQ(fast.redecoded_correct, reference.redecoded_correct);
    const auto targets = attribution::attribution_targets(item.response);
    for (std::size_t t = 0; t < item.response.size(); ++t) {
      EXPECT_EQ(fast.labeled[t] != 0, targets[t]);
      if (fast.labeled[t] == 0) {
        EXPECT_EQ(fast.causal[t], 0);
        continue;
      }
      EXPECT_NE(fast.replacement[t], item.response[t]);
      EXPECT_EQ(fast.causal[t], fast.redecoded_correct[t] == 0 ? 1 : 0);
    }
  }
}

TEST(Oracle, ResultDigitsAreCausalOnTrainedModel) {
  const auto& policy = testing::toy_policy();
  OracleConfig config;
  config.max_new_tokens = 40;
  std::size_t causal = 0;
  std::size_t labeled = 0;
  for (const auto& item : testing::toy_solved_tasks(10, 102)) {
    const auto labels = oracle_label(policy, item.task, item.response, config);
    causal += labels.causal_count();
    for (const auto l : labels.labeled) {
      labeled += l;
    }
  }
  EXPECT_GT(causal, 0u);
  EXPECT_LT(causal, labeled);
}

TEST(Recall, TopKCount) {
  EXPECT_EQ(top_k_count(20.0, 10), 2u);
  EXPECT_EQ(top_k_count(5.0, 7), 1u);
  EXPECT_EQ(top_k_count(100.0, 13), 13u);
  EXPECT_EQ(top_k_count(30.0, 10), 3u);
  EXPECT_EQ(top_k_count(50.0, 0), 0u);
  EXPECT_THROW((void)top_k_count(0.0, 10), ContractViolation);
  const auto grid = default_k_grid();
  ASSERT_EQ(grid.size(), 20u);
  EXPECT_EQ(grid.front(), 5.0);
  EXPECT_EQ(grid.back(), 100.0);
}

TEST(Recall, HandComputedCurve) {
  const std::vector<std::uint8_t> labeled_a = {1, 1, 1, 1, 0};
  const std::vector<std::uint8_t> labeled_b = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  const std::vector<OracleLabels> labels = {
      labels_of(labeled_a, {0, 1, 0, 0, 0}),
      labels_of(labeled_b, {1, 0, 0, 0, 0, 0, 0, 0, 0, 1}),
  };
  const std::vector<attribution::ImportanceProfile> profiles = {
      profile_of(labeled_a, {0.1, 0.9, 0.5, 0.2, 5.0}),
      profile_of(labeled_b, {0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0}),
  };
  const std::vector<double> grid = {10.0, 25.0, 50.0, 100.0};
  const auto curve = recall_curve("hand", labels, profiles, grid);
  // K=10%: 1 of 4 and 1 of 10 -> captures a[1] and b[0].
  EXPECT_DOUBLE_EQ(curve.recall[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(curve.recall[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(curve.recall[2], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(curve.recall[3], 1.0);
}

TEST(Recall, CurveIsMonotoneAndReachesOne) {
  Rng rng(7);
  std::bernoulli_distribution causal(0.2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<OracleLabels> labels;
  std::vector<attribution::ImportanceProfile> profiles;
  for (int i = 0; i < 40; ++i) {
    std::vector<std::uint8_t> labeled(25, 1);
    labeled[24] = 0;
    std::vector<std::uint8_t> flags(25, 0);
    std::vector<double> raw(25);
    for (std::size_t t = 0; t < 24; ++t) {
      flags[t] = causal(rng) ? 1 : 0;
      raw[t] = unit(rng);
    }
    raw[24] = unit(rng);
    labels.push_back(labels_of(labeled, flags));
    profiles.push_back(profile_of(labeled, raw));
  }
  const auto grid = default_k_grid();
  const auto curve = recall_curve("random", labels, profiles, grid);
  for (std::size_t i = 1; i < curve.recall.size(); ++i) {
    EXPECT_GE(curve.recall[i], curve.recall[i - 1]);
  }
  EXPECT_DOUBLE_EQ(curve.recall.back(), 1.0);
  const auto band = random_recall_band(labels, 50.0, 500, 3);
  EXPECT_NEAR(band.mean, 0.5, 0.02);
  EXPECT_GT(band.stddev, 0.0);
  EXPECT_LT(band.lower(), band.mean);
  EXPECT_GT(band.upper(), band.mean);
  EXPECT_EQ(random_recall_band(labels, 50.0, 50, 3).mean, random_recall_band(labels, 50.0, 50, 3).mean);
}

TEST(Recall, NoCausalTokensIsDegenerate) {
  const std::vector<std::uint8_t> labeled = {1, 1};
  const std::vector<OracleLabels> labels = {labels_of(labeled, {0, 0})};
  const std::vector<attribution::ImportanceProfile> profiles = {profile_of(labeled, {0.1, 0.2})};
  const std::vector<double> grid = {50.0};
  EXPECT_THROW(recall_curve("x", labels, profiles, grid), DegenerateInputError);
  EXPECT_THROW(random_recall_band(labels, 50.0, 10, 1), DegenerateInputError);
}

TEST(Variance, BroadcastVarianceGrowsWithLength) {
  VarianceSimConfig config;
  config.length = 50;
  config.trials = 10000;
  const auto gaussian = variance_sim(config);
  EXPECT_NEAR(gaussian.ratio, 50.0, 2.5);
  EXPECT_NEAR(gaussian.token_variance, 1.0, 0.02);
  config.distribution = LatentDistribution::kUniform;
  config.mean = 0.3;
  config.stddev = 2.0;
  const auto uniform = variance_sim(config);
  EXPECT_NEAR(uniform.ratio, 50.0, 2.5);
  EXPECT_NEAR(uniform.token_variance, 4.0, 0.1);
  config.length = 1;
  EXPECT_NEAR(variance_sim(config).ratio, 1.0, 1e-12);
  config.distribution = LatentDistribution::kConstant;
  config.length = 10;
  EXPECT_TRUE(std::isnan(variance_sim(config).ratio));
  EXPECT_THROW(parse_latent_distribution("cauchy"), ContractViolation);
}

TEST(Timing, ReportsAllVariantsRelativeToVanilla) {
  const auto& policy = testing::toy_policy();
  std::vector<tasks::TaskInstance> batch_tasks;
  for (std::uint64_t i = 0; i < 2; ++i) {
    batch_tasks.push_back(tasks::stream_task(111, i, 1, 2, testing::toy_task_config()));
  }
  trainer::RolloutConfig rollout;
  rollout.group_size = 4;
  rollout.max_new_tokens = 40;
  const auto groups = trainer::collect_rollouts(policy, batch_tasks, rollout, 5, 0);
  TimingConfig config;
  config.repeats = 1;
  const auto rows = profile_time_per_token(policy, groups, config);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].variant, "vanilla");
  EXPECT_DOUBLE_EQ(rows[0].normalized, 1.0);
  for (const auto& row : rows) {
    EXPECT_EQ(row.action_tokens, rows[0].action_tokens);
    EXPECT_GT(row.seconds, 0.0);
    EXPECT_NEAR(row.time_per_token, row.seconds / static_cast<double>(row.action_tokens), 1e-15);
    EXPECT_NEAR(row.normalized, row.time_per_token / rows[0].time_per_token, 1e-12);
  }
  EXPECT_EQ(rows[3].variant, "oar_p_serial");
  EXPECT_GT(rows[3].normalized, 1.0);
}

}  // namespace
}  // namespace oar::evaluation
