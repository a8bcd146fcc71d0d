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


#include <gtest/gtest.h>

#include <cmath>

#include "oar/common/error.hpp"
#include "oar/numerics/gradcheck.hpp"
#include "oar/numerics/graph.hpp"
#include "oar/numerics/ops.hpp"
#include "oar/policy/distribution.hpp"
#include "test_support.hpp"

namespace oar::numerics {
namespace {

TEST(Graph, QuadraticGradientMatchesHandDerivative) {
  Graph graph;
  const Var x = graph.leaf(Tensor::vector({2.0, -1.0}));
  const Var loss = dot(x, x);
  graph.backward(loss);
  EXPECT_DOUBLE_EQ(loss.value().item(), 5.0);
  ASSERT_EQ(x.grad().size(), 2u);
  EXPECT_DOUBLE_EQ(x.grad()[0], 4.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], -2.0);
}

TEST(Graph, ReusedNodeAccumulatesGradient) {
  Graph graph;
  const Var x = graph.leaf(Tensor::vector({3.0}));
  const Var y = add(mul(x, x), x);
  graph.backward(sum(y));
  EXPECT_DOUBLE_EQ(x.grad()[0], 7.0);
}

TEST(Graph, ConstantsReceiveNoGradient) {
  Graph graph;
  const Var c = graph.constant(Tensor::vector({1.0, 2.0}));
  const Var x = graph.leaf(Tensor::vector({0.5, -0.5}));
  graph.backward(sum(mul(c, x)));
  EXPECT_FALSE(graph.requires_grad(c));
  EXPECT_DOUBLE_EQ(x.grad()[0], 1.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], 2.0);
}

TEST(Graph, ShapeMismatchIsRejected) {
  Graph graph;
  const Var a = graph.leaf(Tensor({2, 3}));
  const Var b = graph.leaf(Tensor({3, 2}));
  EXPECT_THROW(add(a, b), ContractViolation);
  EXPECT_THROW(matmul(a, a), ContractViolation);
}

TEST(GradCheck, SumOfSquaresHasTinyError) {
  const auto result = finite_difference_check([](Graph&, Var x) { return sum(mul(x, x)); },
                                              Tensor::vector({1.0, 2.0, 3.0}), 1e-5);
  EXPECT_LT(result.max_relative_error, 1e-6);
}

TEST(GradCheck, NonPositiveStepIsRejected) {
  EXPECT_THROW(finite_difference_check([](Graph&, Var x) { return sum(x); }, Tensor::vector({1.0}), 0.0),
               ContractViolation);
}

TEST(GradCheck, SoftmaxCrossEntropyOnSeededLogits) {
  Rng rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor logits({4, 6});
  for (auto& v : logits.data()) {
    v = normal(rng);
  }
  const std::vector<std::size_t> targets = {1, 5, 0, 3};
  const auto result = finite_difference_check(
      [&](Graph&, Var x) { return scale(sum(pick(log_softmax(x), targets)), -0.25); }, logits, 1e-5);
  EXPECT_LT(result.max_relative_error, 1e-4);
}

TEST(GradCheck, EveryOpPassesAcrossTwentySeeds) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (const auto& check : testing::op_gradient_checks(seed)) {
      const auto result = finite_difference_check(check.function, check.input, 1e-5);
      EXPECT_LT(result.max_relative_error, 1e-4) << check.name << " seed " << seed << " coordinate "
                                                 << result.worst_index;
    }
  }
}

TEST(Ops, LogSoftmaxMatchesReference) {
  Graph graph;
  const Var x = graph.constant(Tensor::vector({1.0, -0.5, 2.0, 0.25}));
  const auto out = log_softmax(x).value().data();
  const double expected[] = {-1.4847311347019678, -2.984731134701968, -0.4847311347019678, -2.234731134701968};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(out[i], expected[i], 1e-14);
  }
}

TEST(Ops, LogSoftmaxIsStableForHugeLogits) {
  Graph graph;
  const Var x = graph.constant(Tensor::vector({1000.0, 999.0, -1000.0}));
  const auto out = log_softmax(x).value().data();
  EXPECT_TRUE(std::isfinite(out[0]));
  EXPECT_NEAR(out[0], -std::log1p(std::exp(-1.0)), 1e-12);
}

TEST(Ops, KlDivergenceMatchesReference) {
  Graph graph;
  const Var p = log_softmax(graph.constant(Tensor::vector({1.0, -0.5, 2.0, 0.25})));
  const Var q = log_softmax(graph.constant(Tensor::vector({0.3, 0.1, -1.0, 1.5})));
  EXPECT_NEAR(kl_divergence(p, q).value().item(), 1.3458474783266658, 1e-13);
  EXPECT_NEAR(kl_divergence(p, p).value().item(), 0.0, 1e-15);
}

TEST(Distribution, EntropyAndKlMatchReference) {
  const double logits[] = {1.0, -0.5, 2.0, 0.25};
  const double other[] = {0.3, 0.1, -1.0, 1.5};
  const auto p = policy::TokenDistribution::from_logits(logits);
  const auto q = policy::TokenDistribution::from_logits(other);
  EXPECT_TRUE(p.is_valid());
  EXPECT_NEAR(p.entropy(), 1.0249636917571192, 1e-13);
  EXPECT_NEAR(policy::kl_divergence(p, q), 1.3458474783266658, 1e-13);
  EXPECT_EQ(p.argmax(), 2u);
  EXPECT_EQ(p.second_argmax(), 0u);
}

TEST(Distribution, UniformEntropyIsLogVocabulary) {
  const double logits[] = {0.0, 0.0, 0.0, 0.0};
  EXPECT_NEAR(policy::TokenDistribution::from_logits(logits).entropy(), std::log(4.0), 1e-15);
}

TEST(Distribution, MaskedEntriesHaveZeroProbability) {
  const double logits[] = {5.0, 0.0, 0.0};
  const std::uint8_t allowed[] = {0, 1, 1};
  const auto p = policy::TokenDistribution::from_logits(logits, allowed);
  EXPECT_EQ(p.probs[0], 0.0);
  EXPECT_NEAR(p.probs[1], 0.5, 1e-15);
  EXPECT_NEAR(p.entropy(), std::log(2.0), 1e-15);
}

}  // namespace
}  // namespace oar::numerics
