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

#ifndef OAR_EVALUATION_TIMING_HPP
#define OAR_EVALUATION_TIMING_HPP

#include <string>
#include <vector>

#include "oar/trainer/trainer.hpp"

namespace oar::evaluation {

struct TimingRow {
  std::string variant;
  double seconds = 0.0;
  std::size_t action_tokens = 0;
  double time_per_token = 0.0;
  /// time_per_token relative to the vanilla row.
  double normalized = 0.0;
};

struct TimingConfig {
  /// Gating and attribution settings shared by every variant.
  trainer::CreditConfig credit;
  trainer::ClipConfig clip;
  trainer::AdamConfig adam;
  double temperature = 1.0;
  std::uint64_t seed = 1;
  /// Each variant is timed this many times; the median is reported.
  std::size_t repeats = 3;
  std::size_t workers = 1;
};

/// Times attribution plus one update sweep (gradient and optimizer step on a
/// copy of the policy) for vanilla, oar_g, oar_p (batched) and oar_p (serial)
/// on the same rollout batch, divided by the batch's action tokens and
/// normalized so vanilla is 1.
std::vector<TimingRow> profile_time_per_token(const policy::Policy& policy,
                                              const std::vector<trainer::RolloutGroup>& batch,
                                              const TimingConfig& config);

}  // namespace oar::evaluation

#endif  // OAR_EVALUATION_TIMING_HPP
