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

#include "oar/trainer/sft.hpp"

#include <cmath>

#include "oar/common/error.hpp"
#include "oar/trainer/loss.hpp"

namespace oar::trainer {

void SftConfig::validate() const {
  require(batch_size >= 1, "SFT batch size must be positive");
  adam.validate();
  task.validate();
}

SftResult sft_warmstart(Policy& policy, const SftConfig& config, const std::function<void(std::size_t, double)>& on_step) {
  config.validate();
  SftResult result;
  if (config.steps == 0) {
    return result;
  }
  const auto params = policy.parameters();
  Adam adam(config.adam, params);
  for (std::size_t step = 0; step < config.steps; ++step) {
    std::vector<tasks::TaskInstance> batch;
    for (std::size_t i = 0; i < config.batch_size; ++i) {
      batch.push_back(tasks::stream_task(config.task_seed, step * config.batch_size + i, config.min_difficulty,
                                         config.max_difficulty, config.task));
    }
    auto grads = accumulate_gradients(policy, batch.size(), 1.0 / static_cast<double>(batch.size()), config.workers,
                                      [&](Graph& graph, std::size_t i) {
                                        return sequence_nll(graph, policy, batch[i].prompt, batch[i].gold_trace);
                                      });
    if (!std::isfinite(grads.loss)) {
      throw DivergenceError("SFT loss became non-finite at step " + std::to_string(step));
    }
    adam.step(params, grads.gradients);
    result.losses.push_back(grads.loss);
    if (on_step) {
      on_step(step, grads.loss);
    }
  }
  return result;
}

}  // namespace oar::trainer
