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

#ifndef OAR_ATTRIBUTION_PROBE_HPP
#define OAR_ATTRIBUTION_PROBE_HPP

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "oar/policy/policy.hpp"
#include "oar/tasks/reward.hpp"

namespace oar::attribution {

using policy::Policy;
using policy::TokenDistribution;
using policy::TokenId;

/// Summary of the model's final-answer prediction used as the attribution target.
enum class ProbeKind {
  /// Next-token distribution at the last position of prompt + response.
  kLastTokenLogits,
  /// Distribution of the mean logits over the positions predicting the answer span.
  kAnswerSpanMean,
  /// Mean log-likelihood of the answer-span tokens (a scalar).
  kAnswerSpanJoint,
};

std::string_view to_string(ProbeKind kind);
/// Accepts "lt_logits", "as_mean" and "as_joint"; throws ContractViolation listing them otherwise.
ProbeKind parse_probe_kind(std::string_view text);

struct OutcomeProbe {
  ProbeKind kind = ProbeKind::kAnswerSpanMean;
  /// When the answer span is missing, fall back to kLastTokenLogits instead of failing.
  bool warmup = true;
};

/// A probe bound to one sequence: effective kind and the sequence rows whose
/// next-token logits it reads.
struct ResolvedProbe {
  ProbeKind kind = ProbeKind::kLastTokenLogits;
  std::optional<tasks::AnswerSpan> span;
  /// Rows of prompt + response (0-based) whose logits feed the probe.
  std::vector<std::size_t> rows;
  /// For kAnswerSpanJoint: the token predicted at each row.
  std::vector<TokenId> targets;
};

/// Throws NoSpanError for an answer-span probe on a response without a span
/// when warm-up is disabled.
ResolvedProbe resolve_probe(const OutcomeProbe& probe, std::size_t prompt_length, std::span<const TokenId> response);

struct ProbeValue {
  /// Set for distributional probes.
  std::optional<TokenDistribution> distribution;
  /// Set for kAnswerSpanJoint.
  double score = 0.0;
};

/// Evaluates a resolved probe from the logits of its rows (rows.size() x vocab, in order).
ProbeValue probe_from_logits(const Policy& policy, const ResolvedProbe& probe, std::span<const double> row_logits);

/// Runs the policy on prompt + response and evaluates the probe.
ProbeValue probe_distribution(const Policy& policy, std::span<const TokenId> prompt, std::span<const TokenId> response,
                              const OutcomeProbe& probe);

}  // namespace oar::attribution

#endif  // OAR_ATTRIBUTION_PROBE_HPP
