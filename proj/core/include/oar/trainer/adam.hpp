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

#ifndef OAR_TRAINER_ADAM_HPP
#define OAR_TRAINER_ADAM_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "oar/numerics/tensor.hpp"

namespace oar::trainer {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Global gradient-norm clip; non-positive disables clipping.
  double max_grad_norm = 1.0;

  void validate() const;
};

/// Adam with bias correction and global-norm gradient clipping.
class Adam {
 public:
  Adam(AdamConfig config, std::span<numerics::Tensor* const> parameters);

  /// Applies one update from `gradients` (one flat buffer per parameter, same
  /// order as the constructor). Returns the gradient norm before clipping.
  /// Throws DivergenceError when a gradient is non-finite.
  double step(std::span<numerics::Tensor* const> parameters, const std::vector<std::vector<double>>& gradients);

  [[nodiscard]] std::size_t steps() const noexcept { return steps_; }
  [[nodiscard]] const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t steps_ = 0;
};

/// Euclidean norm over every entry of every buffer.
double global_norm(const std::vector<std::vector<double>>& gradients);

}  // namespace oar::trainer

#endif  // OAR_TRAINER_ADAM_HPP
