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

#include "oar/trainer/credit.hpp"

#include <cmath>

#include "oar/common/error.hpp"

namespace oar::trainer {

std::string_view to_string(CreditMethod method) {
  switch (method) {
    case CreditMethod::kVanilla:
      return "vanilla";
    case CreditMethod::kRandom:
      return "random";
    case CreditMethod::kEntropy:
      return "entropy";
    case CreditMethod::kOarP:
      return "oar_p";
    case CreditMethod::kOarG:
      return "oar_g";
  }
  return "unknown";
}

CreditMethod parse_credit_method(std::string_view text) {
  for (const auto method : {CreditMethod::kVanilla, CreditMethod::kRandom, CreditMethod::kEntropy,
                            CreditMethod::kOarP, CreditMethod::kOarG}) {
    if (text == to_string(method)) {
      return method;
    }
  }
  throw ContractViolation("unknown credit method '" + std::string(text) +
                          "' (valid options: vanilla, random, entropy, oar_p, oar_g)");
}

TokenCredit assign_credit(const Policy& policy, const Trajectory& trajectory, double a_seq,
                          const CreditConfig& config, std::uint64_t seed) {
  const std::size_t length = trajectory.response.size();
  require(length >= 1, "assign_credit: empty response");
  TokenCredit credit;
  switch (config.method) {
    case CreditMethod::kVanilla: {
      auto reshaped = reshaping::uniform_advantages(a_seq, length);
      credit.advantages = reshaped.token_advantages;
      credit.weights = reshaped.omega_tilde;
      credit.reshaped = std::move(reshaped);
      return credit;
    }
    case CreditMethod::kEntropy: {
      const auto stats = policy::logprobs_entropy(policy, trajectory.prompt, trajectory.response, config.temperature);
      credit.advantages = reshaping::entropy_shape(a_seq, stats.entropy, config.entropy_alpha, config.entropy_kappa);
      credit.weights.resize(length);
      for (std::size_t t = 0; t < length; ++t) {
        credit.weights[t] = std::abs(credit.advantages[t]);
        credit.excess_mass += credit.advantages[t] - a_seq;
      }
      credit.degenerate = false;
      return credit;
    }
    case CreditMethod::kRandom:
    case CreditMethod::kOarP:
    case CreditMethod::kOarG:
      break;
  }
  const auto method = config.method == CreditMethod::kRandom ? attribution::ImportanceMethod::kRandom
                      : config.method == CreditMethod::kOarP ? attribution::ImportanceMethod::kOarP
                                                             : attribution::ImportanceMethod::kOarG;
  auto profile = attribution::compute_profile(method, policy, trajectory.prompt, trajectory.response,
                                              config.attribution, seed);
  if (config.force_degenerate) {
    profile.degenerate = true;
  }
  auto reshaped = reshaping::reshape_profile(a_seq, profile, config.gating);
  credit.advantages = reshaped.token_advantages;
  credit.weights = reshaped.omega_tilde;
  credit.degenerate = reshaped.uniform_fallback;
  credit.profile = std::move(profile);
  credit.reshaped = std::move(reshaped);
  return credit;
}

}  // namespace oar::trainer
