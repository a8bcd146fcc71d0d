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

#include "oar/attribution/probe.hpp"

#include "oar/common/error.hpp"
#include "oar/numerics/kernels.hpp"

namespace oar::attribution {

std::string_view to_string(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::kLastTokenLogits:
      return "lt_logits";
    case ProbeKind::kAnswerSpanMean:
      return "as_mean";
    case ProbeKind::kAnswerSpanJoint:
      return "as_joint";
  }
  return "unknown";
}

ProbeKind parse_probe_kind(std::string_view text) {
  for (const auto kind : {ProbeKind::kLastTokenLogits, ProbeKind::kAnswerSpanMean, ProbeKind::kAnswerSpanJoint}) {
    if (text == to_string(kind)) {
      return kind;
    }
  }
  throw ContractViolation("unknown probe '" + std::string(text) + "' (expected lt_logits, as_mean or as_joint)");
}

ResolvedProbe resolve_probe(const OutcomeProbe& probe, std::size_t prompt_length, std::span<const TokenId> response) {
  require(prompt_length >= 1, "probe needs a non-empty prompt");
  ResolvedProbe resolved;
  resolved.span = tasks::extract_answer_span(response);
  resolved.kind = probe.kind;
  if (probe.kind != ProbeKind::kLastTokenLogits && !resolved.span) {
    if (!probe.warmup) {
      throw NoSpanError("answer-span probe '" + std::string(to_string(probe.kind)) +
                        "' requested but the response has no well-formed answer span");
    }
    resolved.kind = ProbeKind::kLastTokenLogits;
  }
  if (resolved.kind == ProbeKind::kLastTokenLogits) {
    resolved.rows = {prompt_length + response.size() - 1};
    return resolved;
  }
  for (std::size_t p = resolved.span->start; p < resolved.span->end; ++p) {
    resolved.rows.push_back(prompt_length + p - 1);
    resolved.targets.push_back(response[p]);
  }
  return resolved;
}

ProbeValue probe_from_logits(const Policy& policy, const ResolvedProbe& probe, std::span<const double> row_logits) {
  const std::size_t vocab = policy.config().vocab_size;
  require(row_logits.size() == probe.rows.size() * vocab, "probe logits have the wrong size");
  ProbeValue value;
  switch (probe.kind) {
    case ProbeKind::kLastTokenLogits:
      value.distribution = policy.distribution(row_logits.first(vocab));
      break;
    case ProbeKind::kAnswerSpanMean: {
      std::vector<double> mean(vocab, 0.0);
      for (std::size_t r = 0; r < probe.rows.size(); ++r) {
        for (std::size_t j = 0; j < vocab; ++j) {
          mean[j] += row_logits[r * vocab + j];
        }
      }
      const double inv = 1.0 / static_cast<double>(probe.rows.size());
      for (auto& m : mean) {
        m *= inv;
      }
      value.distribution = policy.distribution(mean);
      break;
    }
    case ProbeKind::kAnswerSpanJoint: {
      std::vector<double> log_probs(vocab);
      double total = 0.0;
      for (std::size_t r = 0; r < probe.rows.size(); ++r) {
        numerics::kernels::log_softmax_row(row_logits.subspan(r * vocab, vocab), policy.output_mask(), log_probs);
        total += log_probs[probe.targets[r]];
      }
      value.score = total * (1.0 / static_cast<double>(probe.rows.size()));
      break;
    }
  }
  return value;
}

ProbeValue probe_distribution(const Policy& policy, std::span<const TokenId> prompt, std::span<const TokenId> response,
                              const OutcomeProbe& probe) {
  require(!response.empty(), "probe needs a non-empty response");
  const ResolvedProbe resolved = resolve_probe(probe, prompt.size(), response);
  const auto full = policy::join(prompt, response);
  const auto logits = policy.logits(full);
  std::vector<double> rows;
  for (const auto r : resolved.rows) {
    const auto row = logits.row(r);
    rows.insert(rows.end(), row.begin(), row.end());
  }
  return probe_from_logits(policy, resolved, rows);
}

}  // namespace oar::attribution
