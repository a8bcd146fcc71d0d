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

#include "oar/trainer/rollout.hpp"

#include <algorithm>

#include "oar/common/error.hpp"
#include "oar/common/parallel.hpp"

namespace oar::trainer {

void RolloutConfig::validate() const {
  require(group_size >= 2, "group size must be at least 2");
  require(temperature > 0.0, "temperature must be positive");
  require(max_new_tokens >= 1, "max_new_tokens must be positive");
}

std::vector<RolloutGroup> collect_rollouts(const Policy& policy, std::span<const tasks::TaskInstance> tasks,
                                           const RolloutConfig& config, std::uint64_t seed, std::uint64_t step) {
  config.validate();
  const std::size_t g = config.group_size;
  std::vector<RolloutGroup> groups(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    groups[i].task = tasks[i];
    groups[i].trajectories.resize(g);
  }
  parallel_for(tasks.size() * g, config.workers, [&](std::size_t index) {
    const std::size_t i = index / g;
    const std::size_t k = index % g;
    Rng rng = make_rng(seed, {step, i, k});
    const auto generation = policy::sample(policy, tasks[i].prompt, config.temperature, config.max_new_tokens,
                                           policy::DecodeMode::kStochastic, rng);
    Trajectory& traj = groups[i].trajectories[k];
    traj.id = index;
    traj.prompt = tasks[i].prompt;
    traj.response = generation.tokens;
    traj.behavior_log_probs = generation.log_probs;
    traj.behavior_entropy = generation.entropy;
    traj.reward = tasks::compute_reward(traj.response, tasks[i], config.format_weight);
    traj.span = tasks::extract_answer_span(traj.response);
  });
  for (auto& group : groups) {
    for (const auto& traj : group.trajectories) {
      group.rewards.push_back(traj.reward.overall);
    }
    group.advantages = reshaping::normalize_group_rewards(group.rewards);
  }
  return groups;
}

EvalResult evaluate_rewards(const Policy& policy, const EvalConfig& config) {
  require(config.tasks >= 1, "evaluation needs at least one task");
  const std::size_t per_task = config.greedy ? 1 : std::max<std::size_t>(1, config.samples);
  const std::size_t total = config.tasks * per_task;
  std::vector<tasks::RewardBreakdown> rewards(total);
  parallel_for(total, config.workers, [&](std::size_t index) {
    const std::size_t i = index / per_task;
    const auto task =
        tasks::stream_task(config.task_seed, i, config.min_difficulty, config.max_difficulty, config.task);
    Rng rng = make_rng(config.seed, {i, index % per_task});
    const auto mode = config.greedy ? policy::DecodeMode::kGreedy : policy::DecodeMode::kStochastic;
    const auto generation = policy::sample(policy, task.prompt, config.temperature, config.max_new_tokens, mode, rng);
    rewards[index] = tasks::compute_reward(generation.tokens, task, config.format_weight);
  });
  EvalResult result;
  for (const auto& r : rewards) {
    result.accuracy += r.accuracy;
    result.format += r.format;
    result.overall += r.overall;
  }
  const double n = static_cast<double>(total);
  result.accuracy /= n;
  result.format /= n;
  result.overall /= n;
  result.responses = total;
  return result;
}

}  // namespace oar::trainer
