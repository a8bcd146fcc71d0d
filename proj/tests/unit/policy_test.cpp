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

#include "oar/common/error.hpp"
#include "oar/common/rng.hpp"
#include "oar/policy/policy.hpp"
#include "oar/tasks/vocabulary.hpp"
#include "test_support.hpp"

namespace oar::policy {
namespace {

TEST(Policy, FormulaParametersReproduceReferenceLogits) {
  const Policy policy = testing::formula_policy();
  const std::vector<TokenId> ids = {1, 8, 13, 7, 18, 3};
  const Tensor logits = policy.logits(ids);
  ASSERT_EQ(logits.rows(), 6u);
  ASSERT_EQ(logits.cols(), 30u);
  const std::vector<std::pair<std::size_t, std::vector<double>>> reference = {
      {0, {-0.5176044650731874, -0.5248067815397555, -0.4609789621048338, -0.3347598026990905, -0.1632324744272516,
           0.030387603500161522, 0.2198948618485213, 0.37964038221910246, 0.48800335782988136, 0.5303173682856244,
           0.5008554107751477, 0.40360502303519763, 0.25172858882420024, 0.06578187102802943, -0.12906811441506627,
           -0.30644933605798735, -0.4423540776842824, -0.5183882700727973, -0.5242610419762669, -0.4591775412679832,
           -0.33194651444829554, -0.15978808412952536, 0.03399691377638975, 0.2231805888893991, 0.38215781828370743,
           0.48941177975668165, 0.5304261527740283, 0.49964983435498656, 0.4012482548193286, 0.2485396063345325}},
      {3, {-0.40887322677548954, -0.3954179403073189, -0.328444690607973, -0.217017992838534, -0.07621892781582476,
           0.07489601152760188, 0.21587412706384124, 0.3276346922132914, 0.3950514387755019, 0.40899982636952364,
           0.36759200616935284, 0.27643233238621023, 0.1478588392173008, -0.000726654202510298, -0.14921379838489135,
           -0.27750555494945683, -0.3682382364890194, -0.40913160020345296, -0.39465092115344985,
           -0.32675609131649735, -0.21463635740197004, -0.07346659941775707, 0.07764651815025428,
           0.21825054374290964, 0.3293153820995531, 0.39580892837731174, 0.4087315930228174, 0.36633435399927267,
           0.27435547871406474, 0.14524387644464679}},
      {5, {-0.3500943993002439, -0.3283185792458239, -0.2621063797025686, -0.1604193112631829, -0.037020241605332085,
           0.09138934408399575, 0.2074298107783488, 0.2953956256810769, 0.34338102841140095, 0.3448914198194652,
           0.2997223755137566, 0.2139873137434808, 0.09929007291790641, -0.02884561348632849, -0.15307718142607096,
           -0.25659047097732274, -0.32537544400210516, -0.3501223770864133, -0.327481888930397, -0.2605182633946463,
           -0.1582947130548455, -0.03464671589714083, 0.09369055172215282, 0.20934724268809876, 0.2966697664485274,
           0.3438394290609309, 0.3444720379736127, 0.2984819725379531, 0.21209377236150825, 0.09699967507280474}},
  };
  for (const auto& [row, values] : reference) {
    for (std::size_t v = 0; v < values.size(); ++v) {
      EXPECT_NEAR(logits.at(row, v), values[v], 1e-12) << "row " << row << " token " << v;
    }
  }
}

TEST(Policy, GraphPrefillAndIncrementalForwardsAreBitIdentical) {
  const Policy policy = testing::random_policy(5);
  const std::vector<TokenId> ids = {1, 5, 13, 9, 18, 22, 5, 13, 9, 18, 12, 19, 20, 12, 21, 2};
  Graph graph;
  const auto graph_logits = policy.forward(graph, ids).logits.value();
  const Tensor prefill = policy.logits(ids);
  ASSERT_EQ(graph_logits.data().size(), prefill.data().size());
  for (std::size_t i = 0; i < prefill.data().size(); ++i) {
    ASSERT_EQ(graph_logits.data()[i], prefill.data()[i]) << "element " << i;
  }

  DecodeState state;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    Lane lane{&state, std::span<const TokenId>(ids).subspan(t, 1), {0}, {}};
    policy.advance(std::span<Lane>(&lane, 1));
    for (std::size_t v = 0; v < policy.config().vocab_size; ++v) {
      ASSERT_EQ(lane.logits[v], prefill.at(t, v)) << "position " << t << " token " << v;
    }
  }
}

TEST(Policy, BatchedLanesMatchSingleLanes) {
  const Policy policy = testing::random_policy(6);
  const std::vector<TokenId> a = {1, 5, 13, 9, 18};
  const std::vector<TokenId> b = {1, 7, 15, 8, 14, 4, 18};
  DecodeState sa;
  DecodeState sb;
  std::vector<Lane> lanes = {{&sa, a, {a.size() - 1}, {}}, {&sb, b, {0, b.size() - 1}, {}}};
  policy.advance(lanes);
  const Tensor la = policy.logits(a);
  const Tensor lb = policy.logits(b);
  for (std::size_t v = 0; v < 30; ++v) {
    EXPECT_EQ(lanes[0].logits[v], la.at(a.size() - 1, v));
    EXPECT_EQ(lanes[1].logits[v], lb.at(0, v));
    EXPECT_EQ(lanes[1].logits[30 + v], lb.at(b.size() - 1, v));
  }
}

TEST(Policy, ValidateSequenceRejectsBadInput) {
  const Policy policy = testing::random_policy(1, 16, 1, 8);
  const std::vector<TokenId> unknown = {1, 99};
  EXPECT_THROW(policy.validate_sequence(unknown), ContractViolation);
  const std::vector<TokenId> overlong(9, 3);
  EXPECT_THROW(policy.validate_sequence(overlong), ContractViolation);
  const std::vector<TokenId> fine(8, 3);
  EXPECT_NO_THROW(policy.validate_sequence(fine));
}

TEST(Policy, DistributionNeverProducesPadOrBos) {
  const Policy policy = testing::random_policy(2);
  const std::vector<TokenId> ids = {1, 5};
  const auto dist = policy.distribution(policy.logits(ids).row(1));
  EXPECT_EQ(dist.probs[tasks::vocab::kPad], 0.0);
  EXPECT_EQ(dist.probs[tasks::vocab::kBos], 0.0);
  EXPECT_TRUE(dist.is_valid());
}

TEST(Sampling, EmpiricalFrequenciesMatchProbabilities) {
  const Policy policy = testing::formula_policy();
  const std::vector<TokenId> prompt = {1, 8, 13};
  const auto dist = policy.distribution(policy.logits(prompt).row(prompt.size() - 1));
  constexpr std::size_t kDraws = 10000;
  std::vector<double> counts(dist.size(), 0.0);
  Rng rng(99);
  for (std::size_t i = 0; i < kDraws; ++i) {
    const auto generation = sample(policy, prompt, 1.0, 1, DecodeMode::kStochastic, rng);
    ASSERT_EQ(generation.tokens.size(), 1u);
    counts[generation.tokens[0]] += 1.0;
  }
  for (std::size_t v = 0; v < dist.size(); ++v) {
    const double p = dist.probs[v];
    const double se = std::sqrt(p * (1.0 - p) / kDraws);
    EXPECT_LE(std::abs(counts[v] / kDraws - p), 3.0 * se + 1e-12) << "token " << v;
  }
}

TEST(Sampling, GreedyIsDeterministicAndRecordsLogProbs) {
  const Policy policy = testing::random_policy(3);
  const std::vector<TokenId> prompt = {1, 6, 13, 7, 18};
  Rng r1(1);
  Rng r2(2);
  const auto a = sample(policy, prompt, 1.0, 10, DecodeMode::kGreedy, r1);
  const auto b = sample(policy, prompt, 1.0, 10, DecodeMode::kGreedy, r2);
  EXPECT_EQ(a.tokens, b.tokens);
  ASSERT_EQ(a.log_probs.size(), a.tokens.size());
  ASSERT_EQ(a.entropy.size(), a.tokens.size());
  const auto stats = logprobs_entropy(policy, prompt, a.tokens);
  for (std::size_t t = 0; t < a.tokens.size(); ++t) {
    EXPECT_NEAR(stats.log_probs[t], a.log_probs[t], 1e-12);
    EXPECT_NEAR(stats.entropy[t], a.entropy[t], 1e-12);
  }
}

TEST(Sampling, StopsAtEosOrBudget) {
  const Policy& policy = testing::toy_policy();
  const auto solved = testing::toy_solved_tasks(1, 17);
  ASSERT_FALSE(solved.empty());
  EXPECT_EQ(solved[0].response.back(), tasks::vocab::kEos);
  Rng rng(4);
  const auto capped = sample(policy, solved[0].task.prompt, 1.0, 3, DecodeMode::kGreedy, rng);
  EXPECT_EQ(capped.tokens.size(), 3u);
}

TEST(Sampling, TemperatureScalesLogits) {
  const Policy policy = testing::formula_policy();
  const std::vector<TokenId> prompt = {1, 8};
  const auto row = policy.logits(prompt).row(1);
  const auto hot = policy.distribution(row, 2.0);
  std::vector<double> halved(row.begin(), row.end());
  for (auto& v : halved) {
    v *= 0.5;
  }
  const auto reference = TokenDistribution::from_logits(halved, policy.output_mask());
  for (std::size_t v = 0; v < row.size(); ++v) {
    EXPECT_NEAR(hot.probs[v], reference.probs[v], 1e-15);
  }
}

}  // namespace
}  // namespace oar::policy
