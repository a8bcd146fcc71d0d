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

#ifndef OAR_TRAINER_STEP_LOG_HPP
#define OAR_TRAINER_STEP_LOG_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace oar::trainer {

/// Training-dynamics record of one optimizer step.
struct StepLog {
  std::size_t step = 0;
  double reward_overall = 0.0;
  double reward_accuracy = 0.0;
  double reward_format = 0.0;
  /// Mean behavior-policy entropy over sampled tokens.
  double entropy = 0.0;
  /// Mean over attributed trajectories; 1 when none was attributed.
  double ess_ratio = 1.0;
  double top10_mass = 0.0;
  /// No trajectory of the step had a usable (non-degenerate) importance profile.
  bool degenerate = true;
  /// Entropy shaping only: mean over trajectories of sum_t (A_t - A).
  double excess_mass = 0.0;
  /// Wall-clock seconds of collection, attribution and update divided by action tokens.
  double time_per_token = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
  double loss = 0.0;
  std::size_t action_tokens = 0;
  std::size_t degenerate_groups = 0;
  double mean_response_length = 0.0;
};

/// Field names in serialization order.
const std::vector<std::string>& step_log_fields();

nlohmann::ordered_json to_json(const StepLog& log);
/// Throws FormatError naming missing or mistyped fields.
StepLog step_log_from_json(const nlohmann::json& object);

void write_step_log(std::ostream& out, const StepLog& log);
/// Throws FormatError with the offending line number.
std::vector<StepLog> read_step_logs(std::istream& in);

}  // namespace oar::trainer

#endif  // OAR_TRAINER_STEP_LOG_HPP
