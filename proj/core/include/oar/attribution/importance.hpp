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

#ifndef OAR_ATTRIBUTION_IMPORTANCE_HPP
#define OAR_ATTRIBUTION_IMPORTANCE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oar/attribution/probe.hpp"

namespace oar::attribution {

enum class ImportanceMethod { kOarP, kOarG, kEntropy, kRandom };

std::string_view to_string(ImportanceMethod method);
/// Accepts "oar_p", "oar_g", "entropy" and "random".
ImportanceMethod parse_importance_method(std::string_view text);

/// Smoothing constant in the min-max denominator.
inline constexpr double kNormalizeEpsilon = 1e-6;
/// Score ranges below this are treated as constant.
inline constexpr double kDegenerateRange = 1e-12;

struct NormalizedImportance {
  std::vector<double> values;
  /// All raw scores equal: values are all zero and callers fall back to uniform weights.
  bool degenerate = false;
};

/// log(1 + I) followed by per-sequence min-max scaling into [0, 1].
/// Throws ContractViolation on negative or non-finite scores or an empty input.
NormalizedImportance normalize_importance(std::span<const double> raw);

/// Response positions that are attributed: every position before the answer
/// content (the opening tag included). Without a span, every position except
/// a trailing EOS.
std::vector<bool> attribution_targets(std::span<const TokenId> response);

/// Per-token importance of one response.
///
/// Only target positions carry scores; non-target entries of `raw` and
/// `normalized` are zero and are excluded from normalization.
struct ImportanceProfile {
  ImportanceMethod method = ImportanceMethod::kOarP;
  ProbeKind probe = ProbeKind::kLastTokenLogits;
  std::vector<bool> target;
  std::vector<double> raw;
  std::vector<double> normalized;
  bool degenerate = false;

  [[nodiscard]] std::size_t size() const { return raw.size(); }
  [[nodiscard]] std::size_t target_count() const;
};

/// Normalizes `raw` over the target positions only.
ImportanceProfile make_profile(ImportanceMethod method, ProbeKind probe, std::vector<bool> target,
                               std::vector<double> raw);

/// {trajectory_id, method, probe, tokens, I_raw, I_hat}
nlohmann::json importance_record(std::uint64_t trajectory_id, const ImportanceProfile& profile,
                                 std::span<const TokenId> response);

}  // namespace oar::attribution

#endif  // OAR_ATTRIBUTION_IMPORTANCE_HPP
