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

#ifndef OAR_TRAINER_CREDIT_HPP
#define OAR_TRAINER_CREDIT_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "oar/attribution/scores.hpp"
#include "oar/reshaping/advantages.hpp"
#include "oar/trainer/rollout.hpp"

namespace oar::trainer {

enum class CreditMethod { kVanilla, kRandom, kEntropy, kOarP, kOarG };

std::string_view to_string(CreditMethod method);
/// Accepts "vanilla", "random", "entropy", "oar_p" and "oar_g"; the error lists them.
CreditMethod parse_credit_method(std::string_view text);

struct CreditConfig {
  CreditMethod method = CreditMethod::kVanilla;
  reshaping::GatingConfig gating;
  attribution::AttributionConfig attribution;
  double entropy_alpha = 0.4;
  double entropy_kappa = 4.0;
  /// Mark every importance profile degenerate (uniform fallback); used to check
  /// that the fallback reproduces vanilla GRPO exactly.
  bool force_degenerate = false;
  /// Temperature of the behavior policy, used for entropy shaping.
  double temperature = 1.0;
};

/// Token-level advantages of one trajectory.
struct TokenCredit {
  std::vector<double> advantages;
  /// Per-token weights the concentration metrics are computed on: the
  /// renormalized gate output, or |A_t| for entropy shaping.
  std::vector<double> weights;
  /// The importance profile was degenerate (or the method has none).
  bool degenerate = true;
  /// Entropy shaping only: sum_t (A_t - A).
  double excess_mass = 0.0;
  std::optional<attribution::ImportanceProfile> profile;
  std::optional<reshaping::ReshapedAdvantages> reshaped;
};

/// Applies `config.method` to one trajectory with sequence advantage `a_seq`,
/// evaluating importance under `policy` (the behavior policy).
TokenCredit assign_credit(const Policy& policy, const Trajectory& trajectory, double a_seq,
                          const CreditConfig& config, std::uint64_t seed);

}  // namespace oar::trainer

#endif  // OAR_TRAINER_CREDIT_HPP
