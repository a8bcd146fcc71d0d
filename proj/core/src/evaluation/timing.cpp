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

#include "oar/evaluation/timing.hpp"

#include <algorithm>
#include <chrono>

#include "oar/common/error.hpp"

namespace oar::evaluation {

namespace {

struct Variant {
  std::string name;
  trainer::CreditMethod method;
  bool serial;
};

double time_once(const policy::Policy& policy, const std::vector<trainer::RolloutGroup>& batch,
                 const trainer::CreditConfig& credit, const TimingConfig& config) {
  policy::Policy copy = policy;
  const auto start = std::chrono::steady_clock::now();
  const auto credits = trainer::attribute_batch(copy, batch, credit, config.seed, 0, config.workers);
  const auto grads = trainer::surrogate_gradients(copy, batch, credits, config.clip, config.temperature, config.workers);
  const auto params = copy.parameters();
  trainer::Adam adam(config.adam, params);
  adam.step(params, grads.accumulated.gradients);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<TimingRow> profile_time_per_token(const policy::Policy& policy,
                                              const std::vector<trainer::RolloutGroup>& batch,
                                              const TimingConfig& config) {
  require(config.repeats >= 1, "timing needs at least one repeat");
  std::size_t tokens = 0;
  for (const auto& group : batch) {
    for (const auto& traj : group.trajectories) {
      tokens += traj.response.size();
    }
  }
  require(tokens > 0, "timing batch has no action tokens");
  const std::vector<Variant> variants = {{"vanilla", trainer::CreditMethod::kVanilla, false},
                                         {"oar_g", trainer::CreditMethod::kOarG, false},
                                         {"oar_p_batched", trainer::CreditMethod::kOarP, false},
                                         {"oar_p_serial", trainer::CreditMethod::kOarP, true}};
  std::vector<TimingRow> rows;
  for (const auto& variant : variants) {
    trainer::CreditConfig credit = config.credit;
    credit.method = variant.method;
    credit.attribution.serial = variant.serial;
    credit.temperature = config.temperature;
    std::vector<double> samples;
    for (std::size_t r = 0; r < config.repeats; ++r) {
      samples.push_back(time_once(policy, batch, credit, config));
    }
    std::sort(samples.begin(), samples.end());
    TimingRow row;
    row.variant = variant.name;
    row.seconds = samples[samples.size() / 2];
    row.action_tokens = tokens;
    row.time_per_token = row.seconds / static_cast<double>(tokens);
    rows.push_back(row);
  }
  for (auto& row : rows) {
    row.normalized = row.time_per_token / rows.front().time_per_token;
  }
  return rows;
}

}  // namespace oar::evaluation
