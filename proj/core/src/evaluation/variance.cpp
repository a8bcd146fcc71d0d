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

#include "oar/evaluation/variance.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "oar/common/error.hpp"
#include "oar/common/rng.hpp"

namespace oar::evaluation {

namespace {

/// Welford accumulator for the unbiased sample variance.
class RunningVariance {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  [[nodiscard]] double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace

std::string_view to_string(LatentDistribution distribution) {
  switch (distribution) {
    case LatentDistribution::kGaussian:
      return "gaussian";
    case LatentDistribution::kUniform:
      return "uniform";
    case LatentDistribution::kConstant:
      return "constant";
  }
  return "unknown";
}

LatentDistribution parse_latent_distribution(std::string_view text) {
  for (const auto d : {LatentDistribution::kGaussian, LatentDistribution::kUniform, LatentDistribution::kConstant}) {
    if (text == to_string(d)) {
      return d;
    }
  }
  throw ContractViolation("unknown latent distribution '" + std::string(text) +
                          "' (expected gaussian, uniform or constant)");
}

VarianceSimResult variance_sim(const VarianceSimConfig& config) {
  require(config.length >= 1, "variance_sim: length must be at least 1");
  require(config.trials >= 2, "variance_sim: at least two trials are needed");
  require(config.stddev >= 0.0, "variance_sim: stddev must be non-negative");
  Rng rng(config.seed);
  std::normal_distribution<double> normal(config.mean, config.stddev);
  // Uniform on [mean - w, mean + w] has standard deviation w / sqrt(3).
  const double half_width = config.stddev * std::sqrt(3.0);
  std::uniform_real_distribution<double> uniform(config.mean - half_width, config.mean + half_width);
  auto draw = [&]() -> double {
    switch (config.distribution) {
      case LatentDistribution::kGaussian:
        return normal(rng);
      case LatentDistribution::kUniform:
        return uniform(rng);
      case LatentDistribution::kConstant:
        return config.mean;
    }
    return 0.0;
  };
  RunningVariance broadcast;
  RunningVariance token;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    double total = 0.0;
    for (std::size_t t = 0; t < config.length; ++t) {
      const double a = draw();
      token.add(a);
      total += a;
    }
    broadcast.add(total);
  }
  VarianceSimResult result;
  result.broadcast_variance = broadcast.variance();
  result.token_variance = token.variance();
  result.ratio = result.token_variance > 0.0 ? result.broadcast_variance / result.token_variance
                                             : std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace oar::evaluation
