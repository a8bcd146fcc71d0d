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

#ifndef OAR_POLICY_DISTRIBUTION_HPP
#define OAR_POLICY_DISTRIBUTION_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace oar::policy {

/// Categorical distribution over the vocabulary.
///
/// Invariants: probs >= 0 and sum to 1 within 1e-9; log_probs[v] is the log of
/// probs[v] (a large negative sentinel where probs[v] == 0).
struct TokenDistribution {
  std::vector<double> probs;
  std::vector<double> log_probs;

  /// Softmax of `logits` over the allowed entries (all when `allowed` is empty).
  static TokenDistribution from_logits(std::span<const double> logits, std::span<const std::uint8_t> allowed = {});

  [[nodiscard]] std::size_t size() const noexcept { return probs.size(); }
  [[nodiscard]] double entropy() const;
  /// Largest and second-largest entries; ties resolve to the lower id.
  [[nodiscard]] std::size_t argmax() const;
  [[nodiscard]] std::size_t second_argmax() const;
  [[nodiscard]] bool is_valid(double tolerance = 1e-9) const;
};

/// D_KL(p || q), skipping entries where p is zero.
double kl_divergence(const TokenDistribution& p, const TokenDistribution& q);

}  // namespace oar::policy

#endif  // OAR_POLICY_DISTRIBUTION_HPP
