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

#include "oar/trainer/adam.hpp"

#include <cmath>

#include "oar/common/error.hpp"

namespace oar::trainer {

void AdamConfig::validate() const {
  require(learning_rate > 0.0, "learning rate must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "Adam betas must lie in [0, 1)");
  require(eps > 0.0, "Adam eps must be positive");
}

Adam::Adam(AdamConfig config, std::span<numerics::Tensor* const> parameters) : config_(config) {
  config_.validate();
  for (const auto* p : parameters) {
    m_.emplace_back(p->size(), 0.0);
    v_.emplace_back(p->size(), 0.0);
  }
}

double global_norm(const std::vector<std::vector<double>>& gradients) {
  double total = 0.0;
  for (const auto& g : gradients) {
    for (const double v : g) {
      total += v * v;
    }
  }
  return std::sqrt(total);
}

double Adam::step(std::span<numerics::Tensor* const> parameters, const std::vector<std::vector<double>>& gradients) {
  require(parameters.size() == m_.size() && gradients.size() == m_.size(), "Adam::step: parameter count mismatch");
  const double norm = global_norm(gradients);
  if (!std::isfinite(norm)) {
    throw DivergenceError("non-finite gradient norm at optimizer step " + std::to_string(steps_ + 1));
  }
  const double clip = config_.max_grad_norm > 0.0 && norm > config_.max_grad_norm ? config_.max_grad_norm / norm : 1.0;
  ++steps_;
  const double correction1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    auto values = parameters[i]->data();
    require(gradients[i].size() == values.size(), "Adam::step: gradient size mismatch");
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = gradients[i][j] * clip;
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g;
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      values[j] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
  return norm;
}

}  // namespace oar::trainer
