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

#include "oar/reshaping/advantages.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "oar/common/error.hpp"

namespace oar::reshaping {

GroupAdvantages normalize_group_rewards(std::span<const double> rewards) {
  require(rewards.size() >= 2, "normalize_group_rewards: a group needs at least two rewards");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (const double r : rewards) {
    mean += r;
  }
  mean /= n;
  double var = 0.0;
  for (const double r : rewards) {
    var += (r - mean) * (r - mean);
  }
  const double std = std::sqrt(var / n);
  GroupAdvantages out;
  out.advantages.assign(rewards.size(), 0.0);
  if (std < kDegenerateStd) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out.advantages[i] = (rewards[i] - mean) / std;
  }
  return out;
}

std::string_view to_string(TauMode mode) {
  return mode == TauMode::kFixedValue ? "fixed" : "percentile";
}

TauMode parse_tau_mode(std::string_view text) {
  if (text == "fixed") {
    return TauMode::kFixedValue;
  }
  if (text == "percentile") {
    return TauMode::kPerSequencePercentile;
  }
  throw ContractViolation("unknown tau mode '" + std::string(text) + "' (expected fixed or percentile)");
}

void GatingConfig::validate() const {
  require(tau >= 0.0 && tau <= 1.0, "gating tau must lie in [0, 1]");
  require(beta >= 0.0, "gating beta must be non-negative");
  require(eps > 0.0, "gating eps must be positive");
  require(percentile >= 0.0 && percentile <= 100.0, "gating percentile must lie in [0, 100]");
}

double gate(double i_hat, const GatingConfig& config, double tau_effective) {
  if (i_hat < tau_effective) {
    return i_hat / (tau_effective + config.eps);
  }
  return 1.0 + config.beta * (i_hat - tau_effective) / (1.0 - tau_effective + config.eps);
}

double percentile(std::span<const double> values, double p) {
  require(!values.empty(), "percentile of an empty vector");
  require(p >= 0.0 && p <= 100.0, "percentile must lie in [0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double effective_tau(std::span<const double> i_hat, const GatingConfig& config) {
  if (config.tau_mode == TauMode::kFixedValue) {
    return config.tau;
  }
  return percentile(i_hat, config.percentile);
}

ReshapedAdvantages reshape(double a_seq, std::span<const double> i_hat, const GatingConfig& config, bool degenerate) {
  require(!i_hat.empty(), "reshape: empty importance vector");
  config.validate();
  ReshapedAdvantages out;
  out.a_seq = a_seq;
  out.tau_effective = effective_tau(i_hat, config);
  const double count = static_cast<double>(i_hat.size());
  out.omega.resize(i_hat.size());
  double total = 0.0;
  for (std::size_t t = 0; t < i_hat.size(); ++t) {
    require(i_hat[t] >= 0.0 && i_hat[t] <= 1.0, "reshape: normalized importance outside [0, 1]");
    out.omega[t] = gate(i_hat[t], config, out.tau_effective);
    total += out.omega[t];
  }
  out.omega_tilde.resize(i_hat.size());
  if (degenerate || total < 1e-9) {
    out.uniform_fallback = true;
    std::fill(out.omega_tilde.begin(), out.omega_tilde.end(), 1.0);
  } else {
    const double factor = count / total;
    for (std::size_t t = 0; t < i_hat.size(); ++t) {
      out.omega_tilde[t] = out.omega[t] * factor;
    }
  }
  out.token_advantages.resize(i_hat.size());
  for (std::size_t t = 0; t < i_hat.size(); ++t) {
    out.token_advantages[t] = a_seq * out.omega_tilde[t];
  }
  return out;
}

ReshapedAdvantages uniform_advantages(double a_seq, std::size_t length) {
  ReshapedAdvantages out;
  out.a_seq = a_seq;
  out.omega.assign(length, 1.0);
  out.omega_tilde.assign(length, 1.0);
  out.token_advantages.assign(length, a_seq);
  out.uniform_fallback = true;
  return out;
}

ReshapedAdvantages reshape_profile(double a_seq, const attribution::ImportanceProfile& profile,
                                   const GatingConfig& config) {
  std::vector<double> selected;
  for (std::size_t t = 0; t < profile.size(); ++t) {
    if (profile.target[t]) {
      selected.push_back(profile.normalized[t]);
    }
  }
  if (selected.empty()) {
    return uniform_advantages(a_seq, profile.size());
  }
  const ReshapedAdvantages inner = reshape(a_seq, selected, config, profile.degenerate);
  ReshapedAdvantages out = uniform_advantages(a_seq, profile.size());
  out.uniform_fallback = inner.uniform_fallback;
  out.tau_effective = inner.tau_effective;
  std::size_t k = 0;
  for (std::size_t t = 0; t < profile.size(); ++t) {
    if (profile.target[t]) {
      out.omega[t] = inner.omega[k];
      out.omega_tilde[t] = inner.omega_tilde[k];
      out.token_advantages[t] = inner.token_advantages[k];
      ++k;
    }
  }
  return out;
}

std::vector<double> entropy_shape(double a_seq, std::span<const double> entropy, double alpha, double kappa) {
  require(kappa > 0.0, "entropy_shape: kappa must be positive");
  const double cap = std::abs(a_seq) / kappa;
  std::vector<double> out(entropy.size());
  for (std::size_t t = 0; t < entropy.size(); ++t) {
    out[t] = a_seq + std::min(alpha * entropy[t], cap);
  }
  return out;
}

CreditMetrics credit_metrics(std::span<const double> weights) {
  require(!weights.empty(), "credit_metrics: empty weight vector");
  std::vector<double> magnitude(weights.size());
  double total = 0.0;
  double total_sq = 0.0;
  for (std::size_t t = 0; t < weights.size(); ++t) {
    require(std::isfinite(weights[t]), "credit_metrics: non-finite weight at position " + std::to_string(t));
    magnitude[t] = std::abs(weights[t]);
    total += magnitude[t];
    total_sq += magnitude[t] * magnitude[t];
  }
  if (total == 0.0) {
    throw DegenerateInputError("credit_metrics: all weights are zero");
  }
  const double count = static_cast<double>(weights.size());
  CreditMetrics out;
  out.ess_ratio = total * total / (count * total_sq);
  const std::size_t k = std::max<std::size_t>(1, weights.size() / 10);
  std::partial_sort(magnitude.begin(), magnitude.begin() + static_cast<std::ptrdiff_t>(k), magnitude.end(),
                    std::greater<>());
  double top = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    top += magnitude[i];
  }
  out.top10_mass = top / total;
  return out;
}

}  // namespace oar::reshaping
