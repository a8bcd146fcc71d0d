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
#include <numeric>
#include <sstream>

#include "oar/common/error.hpp"
#include "oar/common/rng.hpp"
#include "oar/numerics/graph.hpp"
#include "oar/tasks/task.hpp"
#include "oar/trainer/adam.hpp"
#include "oar/trainer/credit.hpp"
#include "oar/trainer/loss.hpp"
#include "oar/trainer/sft.hpp"
#include "oar/trainer/step_log.hpp"
#include "oar/trainer/trainer.hpp"
#include "test_support.hpp"

namespace oar::trainer {
namespace {

Trajectory sampled_trajectory(const Policy& policy, std::uint64_t seed) {
  const auto task = tasks::generate_task(seed, 1, testing::toy_task_config());
  auto rng = make_rng(seed, {0});
  const auto generation = policy::sample(policy, task.prompt, 1.0, 24, policy::DecodeMode::kStochastic, rng);
  Trajectory trajectory;
  trajectory.prompt = task.prompt;
  trajectory.response = generation.tokens;
  trajectory.behavior_log_probs = generation.log_probs;
  trajectory.behavior_entropy = generation.entropy;
  return trajectory;
}

std::vector<std::vector<double>> loss_gradients(const Policy& policy, const Trajectory& trajectory,
                                                std::span<const double> advantages,
                                                std::span<const std::uint8_t> keep, double* loss) {
  numerics::Graph graph;
  ClipConfig clip;
  auto built = policy_loss(graph, policy, trajectory, advantages, clip, 1.0, nullptr, keep);
  graph.backward(built.loss);
  *loss = built.loss.value().item();
  std::vector<std::vector<double>> out;
  for (auto& p : built.parameters) {
    const auto g = p.grad();
    out.emplace_back(g.begin(), g.end());
  }
  return out;
}

TrainConfig tiny_train_config(CreditMethod method) {
  TrainConfig config;
  config.task = testing::toy_task_config();
  config.min_difficulty = 1;
  config.max_difficulty = 2;
  config.prompts_per_batch = 2;
  config.rollout.group_size = 4;
  config.rollout.max_new_tokens = 20;
  config.credit.method = method;
  config.steps = 2;
  config.seed = 17;
  return config;
}

std::vector<std::vector<double>> parameter_values(const Policy& policy) {
  std::vector<std::vector<double>> out;
  for (const auto* p : policy.parameters()) {
    out.emplace_back(p->data().begin(), p->data().end());
  }
  return out;
}

void expect_same_log(const StepLog& a, const StepLog& b) {
  auto ja = to_json(a);
  auto jb = to_json(b);
  ja.erase("time_per_token");
  jb.erase("time_per_token");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Surrogate, ClippedValues) {
  ClipConfig clip{0.2, 0.2};
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.5, 1.0, clip), 1.2);
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, -1.0, clip), -0.8);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.1, 1.0, clip), 1.1);
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, 1.0, clip), 0.5);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.5, -1.0, clip), -1.5);
  ClipConfig asymmetric;
  EXPECT_DOUBLE_EQ(clipped_surrogate(2.0, 1.0, asymmetric), 1.28);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  numerics::Tensor weights = numerics::Tensor::vector({1.0, -2.0, 0.5});
  std::vector<numerics::Tensor*> params = {&weights};
  AdamConfig config;
  config.learning_rate = 0.01;
  config.max_grad_norm = 0.0;
  Adam adam(config, params);
  const double norm = adam.step(params, {{0.3, -4.0, 0.0}});
  EXPECT_NEAR(norm, std::sqrt(0.09 + 16.0), 1e-15);
  EXPECT_NEAR(weights[0], 1.0 - 0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(weights[1], -2.0 + 0.01 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_EQ(weights[2], 0.5);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, ClipsGlobalNormAndRejectsNonFinite) {
  numerics::Tensor weights = numerics::Tensor::vector({0.0, 0.0});
  std::vector<numerics::Tensor*> params = {&weights};
  AdamConfig config;
  config.max_grad_norm = 1.0;
  Adam adam(config, params);
  EXPECT_NEAR(adam.step(params, {{3.0, 4.0}}), 5.0, 1e-15);
  EXPECT_NEAR(global_norm({{3.0}, {4.0}}), 5.0, 1e-15);
  EXPECT_THROW(adam.step(params, {{std::nan(""), 0.0}}), DivergenceError);
}

TEST(PolicyLoss, OnPolicyValueIsMeanAdvantage) {
  const auto policy = testing::random_policy(31);
  const auto trajectory = sampled_trajectory(policy, 4);
  std::vector<double> advantages(trajectory.response.size());
  for (std::size_t t = 0; t < advantages.size(); ++t) {
    advantages[t] = 0.1 * static_cast<double>(t) - 0.3;
  }
  double loss = 0.0;
  (void)loss_gradients(policy, trajectory, advantages, {}, &loss);
  const double expected = -std::accumulate(advantages.begin(), advantages.end(), 0.0) /
                          static_cast<double>(advantages.size());
  EXPECT_NEAR(loss, expected, 1e-12);
}

TEST(PolicyLoss, DroppedTokenEqualsZeroAdvantage) {
  const auto policy = testing::random_policy(32);
  const auto trajectory = sampled_trajectory(policy, 5);
  ASSERT_GE(trajectory.response.size(), 3u);
  std::vector<double> advantages(trajectory.response.size(), 0.7);
  std::vector<std::uint8_t> keep(trajectory.response.size(), 1);
  keep[1] = 0;
  double masked_loss = 0.0;
  const auto masked = loss_gradients(policy, trajectory, advantages, keep, &masked_loss);
  advantages[1] = 0.0;
  double zero_loss = 0.0;
  const auto zeroed = loss_gradients(policy, trajectory, advantages, {}, &zero_loss);
  EXPECT_NEAR(masked_loss, zero_loss, 1e-15);
  for (std::size_t p = 0; p < masked.size(); ++p) {
    for (std::size_t i = 0; i < masked[p].size(); ++i) {
      ASSERT_NEAR(masked[p][i], zeroed[p][i], 1e-14);
    }
  }
}

TEST(PolicyLoss, ZeroAdvantagesGiveZeroGradient) {
  const auto policy = testing::random_policy(33);
  const auto trajectory = sampled_trajectory(policy, 6);
  const std::vector<double> advantages(trajectory.response.size(), 0.0);
  double loss = 0.0;
  for (const auto& g : loss_gradients(policy, trajectory, advantages, {}, &loss)) {
    for (const double v : g) {
      ASSERT_EQ(v, 0.0);
    }
  }
  EXPECT_EQ(loss, 0.0);
}

TEST(Credit, ParseRejectsUnknownMethodListingOptions) {
  EXPECT_EQ(parse_credit_method("oar_g"), CreditMethod::kOarG);
  try {
    (void)parse_credit_method("bogus");
    FAIL() << "expected ContractViolation";
  } catch (const ContractViolation& e) {
    const std::string message = e.what();
    for (const char* option : {"vanilla", "random", "entropy", "oar_p", "oar_g"}) {
      EXPECT_NE(message.find(option), std::string::npos) << option;
    }
  }
}

TEST(Credit, MethodsPreserveAdvantageSum) {
  const auto& policy = testing::toy_policy();
  const auto item = testing::toy_solved_tasks(1, 91).front();
  Trajectory trajectory;
  trajectory.prompt = item.task.prompt;
  trajectory.response = item.response;
  const auto stats = policy::logprobs_entropy(policy, item.task.prompt, item.response);
  trajectory.behavior_log_probs = stats.log_probs;
  trajectory.behavior_entropy = stats.entropy;
  const double length = static_cast<double>(item.response.size());
  for (const auto method : {CreditMethod::kVanilla, CreditMethod::kRandom, CreditMethod::kOarP, CreditMethod::kOarG}) {
    CreditConfig config;
    config.method = method;
    const auto credit = assign_credit(policy, trajectory, 0.8, config, 3);
    const double total = std::accumulate(credit.advantages.begin(), credit.advantages.end(), 0.0);
    EXPECT_NEAR(total, 0.8 * length, 1e-9) << to_string(method);
  }
  CreditConfig entropy;
  entropy.method = CreditMethod::kEntropy;
  const auto shaped = assign_credit(policy, trajectory, -0.8, entropy, 3);
  const double total = std::accumulate(shaped.advantages.begin(), shaped.advantages.end(), 0.0);
  EXPECT_NEAR(shaped.excess_mass, total + 0.8 * length, 1e-12);
  EXPECT_GT(shaped.excess_mass, 0.0);
}

TEST(Trainer, ResultsIndependentOfWorkerCount) {
  for (const auto method : {CreditMethod::kVanilla, CreditMethod::kOarP, CreditMethod::kOarG}) {
    auto single = tiny_train_config(method);
    auto parallel = single;
    parallel.workers = 3;
    parallel.rollout.workers = 3;
    Trainer a(testing::random_policy(41), single);
    Trainer b(testing::random_policy(41), parallel);
    for (int s = 0; s < 2; ++s) {
      expect_same_log(a.step(), b.step());
    }
    EXPECT_EQ(parameter_values(a.policy()), parameter_values(b.policy())) << to_string(method);
  }
}

TEST(Trainer, ForcedDegenerateMatchesVanilla) {
  auto vanilla = tiny_train_config(CreditMethod::kVanilla);
  auto forced = tiny_train_config(CreditMethod::kOarG);
  forced.credit.force_degenerate = true;
  Trainer a(testing::random_policy(42), vanilla);
  Trainer b(testing::random_policy(42), forced);
  for (int s = 0; s < 2; ++s) {
    expect_same_log(a.step(), b.step());
  }
  EXPECT_EQ(parameter_values(a.policy()), parameter_values(b.policy()));
}

TEST(Trainer, BatchTasksFollowTheStream) {
  const auto config = tiny_train_config(CreditMethod::kVanilla);
  Trainer trainer(testing::random_policy(43), config);
  const auto tasks = trainer.batch_tasks(3);
  ASSERT_EQ(tasks.size(), 2u);
  const auto expected = tasks::stream_task(config.task_seed, 7, 1, 2, config.task);
  EXPECT_EQ(tasks[1].prompt, expected.prompt);
}

TEST(Trainer, StepLogReportsGroupStatistics) {
  auto config = tiny_train_config(CreditMethod::kOarP);
  Trainer trainer(testing::random_policy(44), config);
  const auto log = trainer.step();
  EXPECT_EQ(log.step, 0u);
  std::size_t tokens = 0;
  for (const auto& group : trainer.last_groups()) {
    ASSERT_EQ(group.trajectories.size(), 4u);
    for (const auto& trajectory : group.trajectories) {
      tokens += trajectory.response.size();
    }
  }
  EXPECT_EQ(log.action_tokens, tokens);
  EXPECT_GE(log.ess_ratio, 0.0);
  EXPECT_LE(log.ess_ratio, 1.0 + 1e-12);
  EXPECT_GE(log.clip_fraction, 0.0);
}

TEST(Sft, LossDecreases) {
  auto policy = testing::random_policy(45);
  SftConfig config;
  config.steps = 60;
  config.batch_size = 8;
  config.adam.learning_rate = 3e-3;
  config.task = testing::toy_task_config();
  config.max_difficulty = 2;
  const auto result = sft_warmstart(policy, config);
  ASSERT_EQ(result.losses.size(), 60u);
  const double first = std::accumulate(result.losses.begin(), result.losses.begin() + 10, 0.0);
  const double last = std::accumulate(result.losses.end() - 10, result.losses.end(), 0.0);
  EXPECT_LT(last, 0.8 * first);
}

TEST(StepLogs, JsonRoundTrip) {
  StepLog log;
  log.step = 3;
  log.reward_overall = 0.55;
  log.reward_accuracy = 0.5;
  log.reward_format = 1.0;
  log.entropy = 0.123456789;
  log.ess_ratio = 0.7;
  log.top10_mass = 0.2;
  log.degenerate = false;
  log.time_per_token = 1e-4;
  log.action_tokens = 321;
  log.degenerate_groups = 1;
  std::stringstream stream;
  write_step_log(stream, log);
  write_step_log(stream, log);
  const auto logs = read_step_logs(stream);
  ASSERT_EQ(logs.size(), 2u);
  EXPECT_EQ(to_json(logs[0]).dump(), to_json(log).dump());
  EXPECT_EQ(to_json(log).size(), step_log_fields().size());
}

TEST(StepLogs, MissingFieldsAreNamed) {
  auto object = nlohmann::json(to_json(StepLog{}));
  object.erase("ess_ratio");
  try {
    (void)step_log_from_json(object);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("ess_ratio"), std::string::npos);
  }
  std::stringstream stream("{\"step\": 1}\n");
  EXPECT_THROW(read_step_logs(stream), FormatError);
}

}  // namespace
}  // namespace oar::trainer
