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

#ifndef OAR_TRAINER_TRAINER_HPP
#define OAR_TRAINER_TRAINER_HPP

#include <cstdint>
#include <vector>

#include "oar/trainer/adam.hpp"
#include "oar/trainer/credit.hpp"
#include "oar/trainer/loss.hpp"
#include "oar/trainer/rollout.hpp"
#include "oar/trainer/step_log.hpp"

namespace oar::trainer {

struct TrainConfig {
  RolloutConfig rollout;
  std::size_t prompts_per_batch = 4;
  AdamConfig adam;
  ClipConfig clip;
  CreditConfig credit;
  int min_difficulty = 1;
  int max_difficulty = 3;
  tasks::TaskConfig task;
  /// Seeds sampling and stochastic attribution.
  std::uint64_t seed = 1;
  /// Seeds the prompt stream; step s uses tasks [s * P, (s + 1) * P).
  std::uint64_t task_seed = 2001;
  std::size_t steps = 100;
  /// 0 means one worker per hardware thread.
  std::size_t workers = 1;

  void validate() const;
};

/// Credits of every trajectory, indexed [group][trajectory]. Trajectories of
/// degenerate groups get uniform zero advantages without attribution.
std::vector<std::vector<TokenCredit>> attribute_batch(const Policy& policy, const std::vector<RolloutGroup>& groups,
                                                      const CreditConfig& config, std::uint64_t seed,
                                                      std::uint64_t step, std::size_t workers);

struct SurrogateGradients {
  AccumulatedGradients accumulated;
  SurrogateStats stats;
};

/// Gradient of the mean over trajectories of the token-mean clipped surrogate
/// loss. Trajectories of degenerate groups contribute exactly zero and are
/// skipped.
SurrogateGradients surrogate_gradients(const Policy& policy, const std::vector<RolloutGroup>& groups,
                                       const std::vector<std::vector<TokenCredit>>& credits, const ClipConfig& clip,
                                       double temperature, std::size_t workers);

/// On-policy GRPO loop: collect, attribute, reshape, one optimizer update per batch.
class Trainer {
 public:
  Trainer(Policy policy, TrainConfig config);

  /// Runs one step and returns its log.
  StepLog step();

  [[nodiscard]] const Policy& policy() const noexcept { return policy_; }
  [[nodiscard]] const TrainConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::size_t steps_done() const noexcept { return step_; }
  [[nodiscard]] const std::vector<RolloutGroup>& last_groups() const noexcept { return groups_; }
  [[nodiscard]] const std::vector<std::vector<TokenCredit>>& last_credits() const noexcept { return credits_; }

  /// Prompts of step `step`.
  [[nodiscard]] std::vector<tasks::TaskInstance> batch_tasks(std::size_t step) const;

 private:
  Policy policy_;
  TrainConfig config_;
  Adam adam_;
  std::size_t step_ = 0;
  std::vector<RolloutGroup> groups_;
  std::vector<std::vector<TokenCredit>> credits_;
};

}  // namespace oar::trainer

#endif  // OAR_TRAINER_TRAINER_HPP
