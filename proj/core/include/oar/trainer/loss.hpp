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

#ifndef OAR_TRAINER_LOSS_HPP
#define OAR_TRAINER_LOSS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "oar/numerics/graph.hpp"
#include "oar/trainer/rollout.hpp"

namespace oar::trainer {

using numerics::Graph;
using numerics::Var;

struct ClipConfig {
  double low = 0.2;
  double high = 0.28;

  void validate() const;
};

/// min(rho A, clip(rho, 1 - low, 1 + high) A).
double clipped_surrogate(double rho, double advantage, const ClipConfig& clip);

struct SurrogateStats {
  std::size_t tokens = 0;
  /// Tokens whose surrogate took the clipped branch.
  std::size_t clipped = 0;
};

struct LossGraph {
  Var loss;
  /// Parameter leaves of the forward pass, in parameter order.
  std::vector<Var> parameters;
};

/// Negative token-mean clipped surrogate of one trajectory:
/// -(1/T) sum_t min(rho_t A_t, clip(rho_t) A_t) with rho_t = exp(log pi - log pi_old).
/// Advantages and behavior log-probs are constants. When `keep` is non-empty,
/// positions with keep[t] == 0 are left out of the graph entirely while the
/// divisor stays T. Throws DivergenceError naming the position of a non-finite ratio.
LossGraph policy_loss(Graph& graph, const Policy& policy, const Trajectory& trajectory,
                      std::span<const double> advantages, const ClipConfig& clip, double temperature,
                      SurrogateStats* stats = nullptr, std::span<const std::uint8_t> keep = {});

/// Negative token-mean log-likelihood of `response` given `prompt`.
LossGraph sequence_nll(Graph& graph, const Policy& policy, std::span<const TokenId> prompt,
                       std::span<const TokenId> response);

struct AccumulatedGradients {
  /// One flat buffer per parameter.
  std::vector<std::vector<double>> gradients;
  /// scale * sum of the item losses.
  double loss = 0.0;
};

/// scale * sum_i d loss_i / d theta over `count` items, each built in its own graph.
///
/// Items are summed in fixed blocks whose partial sums are combined in order,
/// so the result is bit-identical for any worker count.
AccumulatedGradients accumulate_gradients(const Policy& policy, std::size_t count, double scale,
                                          std::size_t workers,
                                          const std::function<LossGraph(Graph&, std::size_t)>& build_loss);

}  // namespace oar::trainer

#endif  // OAR_TRAINER_LOSS_HPP
