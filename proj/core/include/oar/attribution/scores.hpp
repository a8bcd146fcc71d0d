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

#ifndef OAR_ATTRIBUTION_SCORES_HPP
#define OAR_ATTRIBUTION_SCORES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "oar/attribution/importance.hpp"
#include "oar/attribution/probe.hpp"

namespace oar::attribution {

struct AttributionConfig {
  OutcomeProbe probe;
  /// Perturbed sequences evaluated per batched forward (OAR-P).
  std::size_t batch_budget = 32;
  /// Evaluate every perturbation with its own full forward (OAR-P reference path).
  bool serial = false;
  /// Noise standard deviation as a multiple of the RMS of the sequence's embedding entries (OAR-G).
  double sigma_scale = 0.05;
  /// Absolute noise standard deviation; overrides sigma_scale when positive.
  double sigma_absolute = 0.0;
  /// Noise draws averaged per sequence (OAR-G).
  std::size_t repeats = 1;
};

/// KL shift of the outcome probe when each target token is replaced by the
/// mask (PAD) token; score drops clamped at zero for kAnswerSpanJoint.
/// Returns one score per response token, zero at non-target positions.
std::vector<double> oar_p_scores(const Policy& policy, std::span<const TokenId> prompt,
                                 std::span<const TokenId> response, const AttributionConfig& config);

struct SelfDistillation {
  /// J: KL(P_0 || P_eps), or half the squared score drop for kAnswerSpanJoint.
  double objective = 0.0;
  /// [T, d_model] token-embedding rows e_t used by the student.
  policy::Tensor embeddings;
  /// [T, d_model] dJ/de_t.
  policy::Tensor gradient;
  double sigma = 0.0;
};

/// One teacher/student evaluation: the teacher reads clean token ids, the
/// student reads `embeddings` (the model's own when null) with Gaussian noise of
/// standard deviation `sigma` on the target response positions.
SelfDistillation self_distillation(const Policy& policy, std::span<const TokenId> prompt,
                                   std::span<const TokenId> response, const OutcomeProbe& probe,
                                   const policy::SequenceEmbeddings* embeddings, double sigma, Rng& rng);

/// Noise standard deviation used for a sequence under `config`.
double noise_sigma(const Policy& policy, std::span<const TokenId> full_sequence, const AttributionConfig& config);

/// |<dJ/de_t, e_t>| averaged over config.repeats noise draws; zero at non-target positions.
std::vector<double> oar_g_scores(const Policy& policy, std::span<const TokenId> prompt,
                                 std::span<const TokenId> response, const AttributionConfig& config,
                                 std::uint64_t seed);

/// Policy entropy at every response position.
std::vector<double> entropy_scores(const Policy& policy, std::span<const TokenId> prompt,
                                   std::span<const TokenId> response);

/// `count` draws from Uniform[0, 1).
std::vector<double> random_scores(std::size_t count, std::uint64_t seed);

/// Raw scores of `method` turned into a profile normalized over the attribution targets.
ImportanceProfile compute_profile(ImportanceMethod method, const Policy& policy, std::span<const TokenId> prompt,
                                  std::span<const TokenId> response, const AttributionConfig& config,
                                  std::uint64_t seed);

}  // namespace oar::attribution

#endif  // OAR_ATTRIBUTION_SCORES_HPP
