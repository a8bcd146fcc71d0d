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

#ifndef OAR_TRAINER_ROLLOUT_HPP
#define OAR_TRAINER_ROLLOUT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "oar/policy/policy.hpp"
#include "oar/reshaping/advantages.hpp"
#include "oar/tasks/reward.hpp"

namespace oar::trainer {

using policy::Policy;
using policy::TokenId;

/// One sampled response.
struct Trajectory {
  std::uint64_t id = 0;
  std::vector<TokenId> prompt;
  std::vector<TokenId> response;
  /// log pi_old(y_t | x, y_<t) recorded while sampling.
  std::vector<double> behavior_log_probs;
  /// Entropy of the behavior policy at each response position.
  std::vector<double> behavior_entropy;
  tasks::RewardBreakdown reward;
  std::optional<tasks::AnswerSpan> span;
};

/// G responses to one prompt with their group-normalized advantages.
struct RolloutGroup {
  tasks::TaskInstance task;
  std::vector<Trajectory> trajectories;
  std::vector<double> rewards;
  reshaping::GroupAdvantages advantages;
};

struct RolloutConfig {
  std::size_t group_size = 8;
  double temperature = 1.0;
  std::size_t max_new_tokens = 64;
  double format_weight = tasks::kDefaultFormatWeight;
  /// 0 means one worker per hardware thread.
  std::size_t workers = 1;

  void validate() const;
};

/// Samples G responses per task from the frozen policy. Trajectory k of task i
/// draws from its own generator seeded by (seed, step, i, k), so the result
/// does not depend on the worker count.
std::vector<RolloutGroup> collect_rollouts(const Policy& policy, std::span<const tasks::TaskInstance> tasks,
                                           const RolloutConfig& config, std::uint64_t seed, std::uint64_t step);

struct EvalConfig {
  std::size_t tasks = 64;
  std::uint64_t task_seed = 9001;
  int min_difficulty = 1;
  int max_difficulty = 3;
  tasks::TaskConfig task;
  std::size_t max_new_tokens = 64;
  bool greedy = true;
  /// Samples per task in stochastic mode.
  std::size_t samples = 1;
  double temperature = 1.0;
  std::uint64_t seed = 1;
  double format_weight = tasks::kDefaultFormatWeight;
  std::size_t workers = 1;
};

struct EvalResult {
  double accuracy = 0.0;
  double format = 0.0;
  double overall = 0.0;
  std::size_t responses = 0;
};

/// Mean rewards of the policy on a held-out task stream.
EvalResult evaluate_rewards(const Policy& policy, const EvalConfig& config);

}  // namespace oar::trainer

#endif  // OAR_TRAINER_ROLLOUT_HPP
