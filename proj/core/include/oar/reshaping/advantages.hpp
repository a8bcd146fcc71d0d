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

#ifndef OAR_RESHAPING_ADVANTAGES_HPP
#define OAR_RESHAPING_ADVANTAGES_HPP

#include <span>
#include <string_view>
#include <vector>

#include "oar/attribution/importance.hpp"

namespace oar::reshaping {

/// Population standard deviations below this mark a group as degenerate.
inline constexpr double kDegenerateStd = 1e-12;

struct GroupAdvantages {
  std::vector<double> advantages;
  /// All rewards equal: every advantage is zero.
  bool degenerate = false;
};

/// (r_i - mean) / population std. Throws ContractViolation for fewer than two rewards.
GroupAdvantages normalize_group_rewards(std::span<const double> rewards);

enum class TauMode { kFixedValue, kPerSequencePercentile };

std::string_view to_string(TauMode mode);
/// Accepts "fixed" and "percentile".
TauMode parse_tau_mode(std::string_view text);

/// Gate smoothing constant; see README for why it is smaller than 1e-6.
inline constexpr double kDefaultGateEpsilon = 1e-8;

struct GatingConfig {
  double tau = 0.4;
  double beta = 2.0;
  double eps = kDefaultGateEpsilon;
  TauMode tau_mode = TauMode::kFixedValue;
  /// Percentile (0..100) of the sequence's normalized scores used as tau in percentile mode.
  double percentile = 70.0;

  void validate() const;
};

/// Bi-level gate: I/(tau+eps) below tau, 1 + beta (I - tau)/(1 - tau + eps) at or above it.
double gate(double i_hat, const GatingConfig& config, double tau_effective);

/// Linear-interpolation percentile of `values` (p in [0, 100]).
double percentile(std::span<const double> values, double p);

/// cfg.tau in fixed mode, otherwise the configured percentile of `i_hat`.
double effective_tau(std::span<const double> i_hat, const GatingConfig& config);

struct ReshapedAdvantages {
  double a_seq = 0.0;
  std::vector<double> omega;
  std::vector<double> omega_tilde;
  std::vector<double> token_advantages;
  /// Uniform weights were used because the importance was degenerate or the gate mass vanished.
  bool uniform_fallback = false;
  double tau_effective = 0.0;
};

/// Gates every entry of `i_hat` and rescales the weights to sum to T.
ReshapedAdvantages reshape(double a_seq, std::span<const double> i_hat, const GatingConfig& config, bool degenerate);

/// Gates the target positions of `profile` and rescales them to sum to the
/// number of targets; non-target positions keep weight 1, so the weights of
/// the whole response still sum to T.
ReshapedAdvantages reshape_profile(double a_seq, const attribution::ImportanceProfile& profile,
                                   const GatingConfig& config);

/// Broadcast advantage: every token weight 1.
ReshapedAdvantages uniform_advantages(double a_seq, std::size_t length);

/// A + min(alpha H_t, |A| / kappa).
std::vector<double> entropy_shape(double a_seq, std::span<const double> entropy, double alpha, double kappa);

struct CreditMetrics {
  /// (sum w)^2 / (T sum w^2) over |w|.
  double ess_ratio = 0.0;
  /// Share of sum |w| carried by the largest max(1, floor(T/10)) entries.
  double top10_mass = 0.0;
};

/// Throws DegenerateInputError when every entry is zero.
CreditMetrics credit_metrics(std::span<const double> weights);

}  // namespace oar::reshaping

#endif  // OAR_RESHAPING_ADVANTAGES_HPP
