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

#include "oar/policy/distribution.hpp"

#include <cmath>

#include "oar/common/error.hpp"
#include "oar/numerics/kernels.hpp"

namespace oar::policy {

TokenDistribution TokenDistribution::from_logits(std::span<const double> logits, std::span<const std::uint8_t> allowed) {
  TokenDistribution dist;
  dist.log_probs.resize(logits.size());
  numerics::kernels::log_softmax_row(logits, allowed, dist.log_probs);
  dist.probs.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    dist.probs[i] = std::exp(dist.log_probs[i]);
  }
  return dist;
}

double TokenDistribution::entropy() const {
  double h = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) {
      h -= probs[i] * log_probs[i];
    }
  }
  return h;
}

std::size_t TokenDistribution::argmax() const {
  require(!probs.empty(), "argmax of an empty distribution");
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (log_probs[i] > log_probs[best]) {
      best = i;
    }
  }
  return best;
}

std::size_t TokenDistribution::second_argmax() const {
  const std::size_t best = argmax();
  std::size_t second = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (i == best || probs[i] <= 0.0) {
      continue;
    }
    if (second == probs.size() || log_probs[i] > log_probs[second]) {
      second = i;
    }
  }
  if (second == probs.size()) {
    throw DegenerateInputError("distribution has fewer than two tokens with nonzero probability");
  }
  return second;
}

bool TokenDistribution::is_valid(double tolerance) const {
  double total = 0.0;
  for (const double p : probs) {
    if (!(p >= 0.0)) {
      return false;
    }
    total += p;
  }
  return std::abs(total - 1.0) <= tolerance;
}

double kl_divergence(const TokenDistribution& p, const TokenDistribution& q) {
  require(p.size() == q.size(), "kl_divergence: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.probs[i] > 0.0) {
      total += p.probs[i] * (p.log_probs[i] - q.log_probs[i]);
    }
  }
  return total;
}

}  // namespace oar::policy
