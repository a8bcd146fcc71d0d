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

#ifndef OAR_EVALUATION_VARIANCE_HPP
#define OAR_EVALUATION_VARIANCE_HPP

#include <cstdint>
#include <string_view>

namespace oar::evaluation {

enum class LatentDistribution { kGaussian, kUniform, kConstant };

std::string_view to_string(LatentDistribution distribution);
/// Accepts "gaussian", "uniform" and "constant".
LatentDistribution parse_latent_distribution(std::string_view text);

struct VarianceSimConfig {
  std::size_t length = 50;
  std::size_t trials = 10000;
  LatentDistribution distribution = LatentDistribution::kGaussian;
  /// Mean and standard deviation of the latent contributions (the constant
  /// distribution always returns `mean`).
  double mean = 0.0;
  double stddev = 1.0;
  std::uint64_t seed = 1;
};

struct VarianceSimResult {
  /// Empirical variance of the broadcast signal A = sum_t a_t across trials.
  double broadcast_variance = 0.0;
  /// Empirical variance of individual contributions a_t, pooled over positions.
  double token_variance = 0.0;
  /// broadcast / token; NaN when the token variance is zero.
  double ratio = 0.0;
};

/// Draws `trials` sequences of `length` i.i.d. latent contributions.
/// Throws ContractViolation for length < 1 or trials < 2.
VarianceSimResult variance_sim(const VarianceSimConfig& config);

}  // namespace oar::evaluation

#endif  // OAR_EVALUATION_VARIANCE_HPP
