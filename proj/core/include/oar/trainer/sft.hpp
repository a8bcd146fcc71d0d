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

#ifndef OAR_TRAINER_SFT_HPP
#define OAR_TRAINER_SFT_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "oar/tasks/task.hpp"
#include "oar/trainer/adam.hpp"
#include "oar/trainer/rollout.hpp"

namespace oar::trainer {

struct SftConfig {
  std::size_t steps = 1500;
  std::size_t batch_size = 16;
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8, 1.0};
  int min_difficulty = 1;
  int max_difficulty = 3;
  tasks::TaskConfig task;
  std::uint64_t task_seed = 1001;
  std::size_t workers = 1;

  void validate() const;
};

struct SftResult {
  /// Mean token-level cross-entropy of each step's batch, before the update.
  std::vector<double> losses;
};

/// Cross-entropy training on gold traces. Step s trains on tasks
/// [s * batch_size, (s + 1) * batch_size) of the stream `task_seed`.
/// Zero steps leave the policy untouched. Throws DivergenceError when the loss
/// becomes non-finite.
SftResult sft_warmstart(Policy& policy, const SftConfig& config,
                        const std::function<void(std::size_t, double)>& on_step = {});

}  // namespace oar::trainer

#endif  // OAR_TRAINER_SFT_HPP
