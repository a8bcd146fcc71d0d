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

#include "oar/trainer/trainer.hpp"

#include <chrono>
#include <cmath>

#include "oar/common/error.hpp"
#include "oar/common/parallel.hpp"

namespace oar::trainer {

namespace {

constexpr std::uint64_t kCreditStream = 0x63726564ULL;

}  // namespace

void TrainConfig::validate() const {
  rollout.validate();
  adam.validate();
  clip.validate();
  credit.gating.validate();
  task.validate();
  require(prompts_per_batch >= 1, "prompts_per_batch must be positive");
  require(min_difficulty >= tasks::kMinDifficulty && max_difficulty <= tasks::kMaxDifficulty &&
              min_difficulty <= max_difficulty,
          "difficulty range must lie within [1, 6]");
}

std::vector<std::vector<TokenCredit>> attribute_batch(const Policy& policy, const std::vector<RolloutGroup>& groups,
                                                      const CreditConfig& config, std::uint64_t seed,
                                                      std::uint64_t step, std::size_t workers) {
  std::vector<std::vector<TokenCredit>> credits(groups.size());
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    credits[i].resize(groups[i].trajectories.size());
    for (std::size_t k = 0; k < groups[i].trajectories.size(); ++k) {
      const auto& traj = groups[i].trajectories[k];
      if (groups[i].advantages.degenerate || traj.response.empty()) {
        auto uniform = reshaping::uniform_advantages(0.0, traj.response.size());
        credits[i][k].advantages = uniform.token_advantages;
        credits[i][k].weights = uniform.omega_tilde;
        credits[i][k].reshaped = std::move(uniform);
      } else {
        work.emplace_back(i, k);
      }
    }
  }
  parallel_for(work.size(), workers, [&](std::size_t w) {
    const auto [i, k] = work[w];
    credits[i][k] = assign_credit(policy, groups[i].trajectories[k], groups[i].advantages.advantages[k], config,
                                  derive_seed(seed, {step, i, k, kCreditStream}));
  });
  return credits;
}

SurrogateGradients surrogate_gradients(const Policy& policy, const std::vector<RolloutGroup>& groups,
                                       const std::vector<std::vector<TokenCredit>>& credits, const ClipConfig& clip,
                                       double temperature, std::size_t workers) {
  std::vector<std::pair<std::size_t, std::size_t>> items;
  std::size_t total = 0;
  SurrogateGradients out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t k = 0; k < groups[i].trajectories.size(); ++k) {
      ++total;
      out.stats.tokens += groups[i].trajectories[k].response.size();
      if (!groups[i].advantages.degenerate && !groups[i].trajectories[k].response.empty()) {
        items.emplace_back(i, k);
      }
    }
  }
  require(total > 0, "surrogate_gradients: empty batch");
  std::vector<SurrogateStats> item_stats(items.size());
  out.accumulated = accumulate_gradients(
      policy, items.size(), 1.0 / static_cast<double>(total), workers, [&](Graph& graph, std::size_t n) {
        const auto [i, k] = items[n];
        SurrogateStats local;
        auto lg = policy_loss(graph, policy, groups[i].trajectories[k], credits[i][k].advantages, clip, temperature,
                              &local);
        item_stats[n] = local;
        return lg;
      });
  for (const auto& s : item_stats) {
    out.stats.clipped += s.clipped;
  }
  return out;
}

Trainer::Trainer(Policy policy, TrainConfig config)
    : policy_(std::move(policy)), config_(config), adam_(config.adam, policy_.parameters()) {
  config_.validate();
  config_.credit.temperature = config_.rollout.temperature;
  config_.rollout.workers = config_.workers;
}

std::vector<tasks::TaskInstance> Trainer::batch_tasks(std::size_t step) const {
  std::vector<tasks::TaskInstance> batch;
  for (std::size_t i = 0; i < config_.prompts_per_batch; ++i) {
    batch.push_back(tasks::stream_task(config_.task_seed, step * config_.prompts_per_batch + i,
                                       config_.min_difficulty, config_.max_difficulty, config_.task));
  }
  return batch;
}

StepLog Trainer::step() {
  const auto start = std::chrono::steady_clock::now();
  const auto batch = batch_tasks(step_);
  groups_ = collect_rollouts(policy_, batch, config_.rollout, config_.seed, step_);
  credits_ = attribute_batch(policy_, groups_, config_.credit, config_.seed, step_, config_.workers);
  const auto grads =
      surrogate_gradients(policy_, groups_, credits_, config_.clip, config_.rollout.temperature, config_.workers);
  if (!std::isfinite(grads.accumulated.loss)) {
    throw DivergenceError("non-finite policy loss at step " + std::to_string(step_));
  }
  const auto params = policy_.parameters();
  const double grad_norm = adam_.step(params, grads.accumulated.gradients);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  StepLog log;
  log.step = step_;
  log.loss = grads.accumulated.loss;
  log.grad_norm = grad_norm;
  log.action_tokens = grads.stats.tokens;
  log.clip_fraction =
      grads.stats.tokens > 0 ? static_cast<double>(grads.stats.clipped) / static_cast<double>(grads.stats.tokens) : 0.0;
  log.time_per_token = grads.stats.tokens > 0 ? elapsed / static_cast<double>(grads.stats.tokens) : 0.0;
  std::size_t trajectories = 0;
  std::size_t entropy_tokens = 0;
  double ess_total = 0.0;
  double top_total = 0.0;
  std::size_t metric_count = 0;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].advantages.degenerate) {
      ++log.degenerate_groups;
    }
    for (std::size_t k = 0; k < groups_[i].trajectories.size(); ++k) {
      const auto& traj = groups_[i].trajectories[k];
      const auto& credit = credits_[i][k];
      ++trajectories;
      log.reward_overall += traj.reward.overall;
      log.reward_accuracy += traj.reward.accuracy;
      log.reward_format += traj.reward.format;
      log.mean_response_length += static_cast<double>(traj.response.size());
      for (const double h : traj.behavior_entropy) {
        log.entropy += h;
        ++entropy_tokens;
      }
      log.excess_mass += credit.excess_mass;
      if (!groups_[i].advantages.degenerate && !credit.degenerate) {
        log.degenerate = false;
      }
      if (traj.response.empty()) {
        continue;
      }
      const auto metrics = groups_[i].advantages.degenerate
                               ? reshaping::credit_metrics(std::vector<double>(traj.response.size(), 1.0))
                               : reshaping::credit_metrics(credit.weights);
      ess_total += metrics.ess_ratio;
      top_total += metrics.top10_mass;
      ++metric_count;
    }
  }
  const double n = static_cast<double>(trajectories);
  log.reward_overall /= n;
  log.reward_accuracy /= n;
  log.reward_format /= n;
  log.mean_response_length /= n;
  log.excess_mass /= n;
  log.entropy = entropy_tokens > 0 ? log.entropy / static_cast<double>(entropy_tokens) : 0.0;
  if (metric_count > 0) {
    log.ess_ratio = ess_total / static_cast<double>(metric_count);
    log.top10_mass = top_total / static_cast<double>(metric_count);
  }
  ++step_;
  return log;
}

}  // namespace oar::trainer
