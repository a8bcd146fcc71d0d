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

#include "oar/trainer/loss.hpp"

#include <algorithm>
#include <cmath>

#include "oar/common/error.hpp"
#include "oar/common/parallel.hpp"
#include "oar/numerics/ops.hpp"

namespace oar::trainer {

namespace {

constexpr std::size_t kGradientBlock = 8;

}  // namespace

void ClipConfig::validate() const {
  require(low > 0.0 && low < 1.0 && high > 0.0 && high < 1.0, "clip bounds must lie in (0, 1)");
}

double clipped_surrogate(double rho, double advantage, const ClipConfig& clip) {
  const double clipped = std::clamp(rho, 1.0 - clip.low, 1.0 + clip.high);
  return std::min(rho * advantage, clipped * advantage);
}

LossGraph policy_loss(Graph& graph, const Policy& policy, const Trajectory& trajectory,
                      std::span<const double> advantages, const ClipConfig& clip, double temperature,
                      SurrogateStats* stats, std::span<const std::uint8_t> keep) {
  using namespace numerics;
  const std::size_t length = trajectory.response.size();
  require(length >= 1, "policy_loss: empty response");
  require(advantages.size() == length && trajectory.behavior_log_probs.size() == length,
          "policy_loss: advantages, behavior log-probs and response differ in length");
  require(keep.empty() || keep.size() == length, "policy_loss: keep mask length mismatch");
  require(temperature > 0.0, "policy_loss: temperature must be positive");
  clip.validate();

  std::vector<std::size_t> positions;
  for (std::size_t t = 0; t < length; ++t) {
    if (keep.empty() || keep[t] != 0) {
      positions.push_back(t);
    }
  }
  const auto full = policy::join(trajectory.prompt, trajectory.response);
  policy::ForwardOptions options;
  const std::size_t prompt_length = trajectory.prompt.size();
  for (const auto t : positions) {
    options.logit_rows.push_back(prompt_length + t - 1);
  }
  LossGraph out;
  if (positions.empty()) {
    auto result = policy.forward(graph, std::span<const TokenId>(full).first(prompt_length), {});
    out.parameters = std::move(result.parameters);
    out.loss = graph.constant(policy::Tensor::scalar(0.0));
    return out;
  }
  auto result = policy.forward(graph, full, options);
  out.parameters = std::move(result.parameters);
  Var logits = result.logits;
  if (temperature != 1.0) {
    logits = scale(logits, 1.0 / temperature);
  }
  std::vector<std::size_t> picks;
  std::vector<double> old_lp;
  std::vector<double> adv;
  for (const auto t : positions) {
    picks.push_back(trajectory.response[t]);
    old_lp.push_back(trajectory.behavior_log_probs[t]);
    adv.push_back(advantages[t]);
  }
  const Var log_pi = pick(log_softmax(logits, policy.output_mask()), picks);
  const Var ratio = numerics::exp(sub(log_pi, graph.constant(policy::Tensor::vector(old_lp))));
  const auto& rho = ratio.value();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!std::isfinite(rho[i])) {
      throw DivergenceError("non-finite importance ratio at response position " + std::to_string(positions[i]) +
                            " of trajectory " + std::to_string(trajectory.id));
    }
  }
  if (stats != nullptr) {
    stats->tokens += positions.size();
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if ((adv[i] > 0.0 && rho[i] > 1.0 + clip.high) || (adv[i] < 0.0 && rho[i] < 1.0 - clip.low)) {
        ++stats->clipped;
      }
    }
  }
  const Var a = graph.constant(policy::Tensor::vector(adv));
  const Var unclipped = mul(ratio, a);
  const Var clipped = mul(clamp(ratio, 1.0 - clip.low, 1.0 + clip.high), a);
  const Var surrogate = minimum(unclipped, clipped);
  out.loss = scale(sum(surrogate), -1.0 / static_cast<double>(length));
  return out;
}

LossGraph sequence_nll(Graph& graph, const Policy& policy, std::span<const TokenId> prompt,
                       std::span<const TokenId> response) {
  using namespace numerics;
  require(!prompt.empty() && !response.empty(), "sequence_nll: prompt and response must be non-empty");
  const auto full = policy::join(prompt, response);
  policy::ForwardOptions options;
  std::vector<std::size_t> picks;
  for (std::size_t t = 0; t < response.size(); ++t) {
    options.logit_rows.push_back(prompt.size() + t - 1);
    picks.push_back(response[t]);
  }
  auto result = policy.forward(graph, full, options);
  LossGraph out;
  out.parameters = std::move(result.parameters);
  out.loss = scale(sum(pick(log_softmax(result.logits, policy.output_mask()), picks)),
                   -1.0 / static_cast<double>(response.size()));
  return out;
}

AccumulatedGradients accumulate_gradients(const Policy& policy, std::size_t count, double scale,
                                          std::size_t workers,
                                          const std::function<LossGraph(Graph&, std::size_t)>& build_loss) {
  const auto params = policy.parameters();
  auto zeros = [&] {
    std::vector<std::vector<double>> g;
    for (const auto* p : params) {
      g.emplace_back(p->size(), 0.0);
    }
    return g;
  };
  const std::size_t blocks = (count + kGradientBlock - 1) / kGradientBlock;
  std::vector<AccumulatedGradients> partial(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    auto& acc = partial[b];
    acc.gradients = zeros();
    const std::size_t end = std::min(count, (b + 1) * kGradientBlock);
    for (std::size_t i = b * kGradientBlock; i < end; ++i) {
      Graph graph;
      const LossGraph lg = build_loss(graph, i);
      if (!std::isfinite(lg.loss.value().item())) {
        throw DivergenceError("non-finite loss for item " + std::to_string(i));
      }
      acc.loss += lg.loss.value().item();
      graph.backward(lg.loss);
      for (std::size_t p = 0; p < lg.parameters.size(); ++p) {
        const auto grad = lg.parameters[p].grad();
        auto& dst = acc.gradients[p];
        for (std::size_t j = 0; j < dst.size(); ++j) {
          dst[j] += grad[j];
        }
      }
    }
  });
  AccumulatedGradients total;
  total.gradients = zeros();
  for (const auto& acc : partial) {
    total.loss += acc.loss;
    for (std::size_t p = 0; p < total.gradients.size(); ++p) {
      for (std::size_t j = 0; j < total.gradients[p].size(); ++j) {
        total.gradients[p][j] += acc.gradients[p][j];
      }
    }
  }
  total.loss *= scale;
  for (auto& g : total.gradients) {
    for (auto& v : g) {
      v *= scale;
    }
  }
  return total;
}

}  // namespace oar::trainer
