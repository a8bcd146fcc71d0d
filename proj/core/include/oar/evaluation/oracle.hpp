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

#ifndef OAR_EVALUATION_ORACLE_HPP
#define OAR_EVALUATION_ORACLE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "oar/policy/policy.hpp"
#include "oar/tasks/reward.hpp"

namespace oar::evaluation {

using policy::Policy;
using policy::TokenId;

/// Counterfactual causal labels of one response.
///
/// Position t is labeled when it precedes the answer content (the attribution
/// targets); at each labeled position the token is replaced by the policy's
/// second most probable token (or by the most probable one when the sampled
/// token was not the mode) and the rest is re-decoded greedily.
struct OracleLabels {
  std::vector<std::uint8_t> labeled;
  /// O_t: 1 when the replacement flips correctness.
  std::vector<std::uint8_t> causal;
  std::vector<TokenId> replacement;
  std::vector<std::uint8_t> redecoded_correct;
  bool original_correct = false;

  [[nodiscard]] std::size_t size() const { return labeled.size(); }
  [[nodiscard]] std::size_t causal_count() const;
};

struct OracleConfig {
  /// Cap on the total response length after re-decoding.
  std::size_t max_new_tokens = 64;
  double format_weight = tasks::kDefaultFormatWeight;
};

/// Reuses the clean prefix cache for every position.
OracleLabels oracle_label(const Policy& policy, const tasks::TaskInstance& task, std::span<const TokenId> response,
                          const OracleConfig& config);

/// Independent re-implementation: every position re-runs the prefix from
/// scratch and decodes with policy::sample().
OracleLabels oracle_label_reference(const Policy& policy, const tasks::TaskInstance& task,
                                    std::span<const TokenId> response, const OracleConfig& config);

}  // namespace oar::evaluation

#endif  // OAR_EVALUATION_ORACLE_HPP
