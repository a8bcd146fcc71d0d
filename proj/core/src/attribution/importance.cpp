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

#include "oar/attribution/importance.hpp"

#include <algorithm>
#include <cmath>

#include "oar/common/error.hpp"
#include "oar/tasks/vocabulary.hpp"

namespace oar::attribution {

std::string_view to_string(ImportanceMethod method) {
  switch (method) {
    case ImportanceMethod::kOarP:
      return "oar_p";
    case ImportanceMethod::kOarG:
      return "oar_g";
    case ImportanceMethod::kEntropy:
      return "entropy";
    case ImportanceMethod::kRandom:
      return "random";
  }
  return "unknown";
}

ImportanceMethod parse_importance_method(std::string_view text) {
  for (const auto method :
       {ImportanceMethod::kOarP, ImportanceMethod::kOarG, ImportanceMethod::kEntropy, ImportanceMethod::kRandom}) {
    if (text == to_string(method)) {
      return method;
    }
  }
  throw ContractViolation("unknown importance method '" + std::string(text) +
                          "' (expected oar_p, oar_g, entropy or random)");
}

NormalizedImportance normalize_importance(std::span<const double> raw) {
  require(!raw.empty(), "normalize_importance: empty score vector");
  NormalizedImportance out;
  out.values.resize(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) {
    require(std::isfinite(raw[t]) && raw[t] >= 0.0,
            "normalize_importance: score at position " + std::to_string(t) + " is negative or non-finite");
    out.values[t] = std::log1p(raw[t]);
  }
  const auto [lo_it, hi_it] = std::minmax_element(out.values.begin(), out.values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (range < kDegenerateRange) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.degenerate = true;
    return out;
  }
  const double denom = range + kNormalizeEpsilon;
  for (auto& v : out.values) {
    v = (v - lo) / denom;
  }
  return out;
}

std::vector<bool> attribution_targets(std::span<const TokenId> response) {
  std::vector<bool> target(response.size(), false);
  std::size_t limit = response.size();
  if (const auto span = tasks::extract_answer_span(response)) {
    limit = span->start;
  } else if (!response.empty() && response.back() == tasks::vocab::kEos) {
    limit = response.size() - 1;
  }
  std::fill(target.begin(), target.begin() + static_cast<std::ptrdiff_t>(limit), true);
  return target;
}

std::size_t ImportanceProfile::target_count() const {
  return static_cast<std::size_t>(std::count(target.begin(), target.end(), true));
}

ImportanceProfile make_profile(ImportanceMethod method, ProbeKind probe, std::vector<bool> target,
                               std::vector<double> raw) {
  require(target.size() == raw.size(), "make_profile: target mask and scores differ in length");
  ImportanceProfile profile;
  profile.method = method;
  profile.probe = probe;
  profile.normalized.assign(raw.size(), 0.0);
  std::vector<double> selected;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    if (target[t]) {
      selected.push_back(raw[t]);
    } else {
      raw[t] = 0.0;
    }
  }
  if (selected.empty()) {
    profile.degenerate = true;
  } else {
    const auto normalized = normalize_importance(selected);
    profile.degenerate = normalized.degenerate;
    std::size_t k = 0;
    for (std::size_t t = 0; t < raw.size(); ++t) {
      if (target[t]) {
        profile.normalized[t] = normalized.values[k++];
      }
    }
  }
  profile.target = std::move(target);
  profile.raw = std::move(raw);
  return profile;
}

nlohmann::json importance_record(std::uint64_t trajectory_id, const ImportanceProfile& profile,
                                 std::span<const TokenId> response) {
  require(response.size() == profile.size(), "importance_record: response and profile differ in length");
  std::vector<std::string> tokens;
  for (const auto id : response) {
    tokens.push_back(tasks::token_string(id));
  }
  return {{"trajectory_id", trajectory_id}, {"method", to_string(profile.method)},
          {"probe", to_string(profile.probe)},  {"tokens", tokens},
          {"I_raw", profile.raw},               {"I_hat", profile.normalized}};
}

}  // namespace oar::attribution
