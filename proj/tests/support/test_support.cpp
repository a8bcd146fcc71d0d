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


#include "test_support.hpp"

#include <cmath>

#include "oar/common/rng.hpp"
#include "oar/numerics/ops.hpp"
#include "oar/tasks/reward.hpp"
#include "oar/tasks/vocabulary.hpp"
#include "oar/trainer/sft.hpp"

namespace oar::testing {

using numerics::Graph;
using numerics::Tensor;
using numerics::Var;

namespace {

Tensor normal_tensor(numerics::Shape shape, Rng& rng, double stddev = 1.0) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> normal(0.0, stddev);
  for (auto& v : t.data()) {
    v = normal(rng);
  }
  return t;
}

Var square_sum(Var v) { return numerics::sum(numerics::mul(v, v)); }

}  // namespace

std::vector<OpCheck> op_gradient_checks(std::uint64_t seed) {
  using namespace numerics;
  auto rng = make_rng(seed, {0x6f7073});
  const Tensor x = normal_tensor({3, 4}, rng);
  const Tensor c = normal_tensor({3, 4}, rng);
  const Tensor c2 = normal_tensor({3, 4}, rng);
  const Tensor b = normal_tensor({4, 5}, rng);
  const Tensor w5 = normal_tensor({3, 5}, rng);
  const Tensor d = normal_tensor({2, 4}, rng);
  const Tensor g = normal_tensor({4}, rng);
  const Tensor sq = normal_tensor({4, 4}, rng);
  const Tensor w44 = normal_tensor({4, 4}, rng);
  const Tensor row = normal_tensor({4}, rng);
  const Tensor q = normal_tensor({3, 4}, rng);
  const std::vector<std::uint8_t> allowed = {1, 0, 1, 1};
  // Masked entries hold a huge constant; zero weights keep the probe sum well conditioned.
  Tensor c_allowed = c;
  for (std::size_t i = 0; i < c_allowed.rows(); ++i) {
    c_allowed.at(i, 1) = 0.0;
  }
  const std::vector<std::size_t> gather = {2, 0, 2};
  const std::vector<std::size_t> picks = {1, 3, 0};

  std::vector<OpCheck> checks;
  checks.push_back({"add", [=](Graph& gr, Var in) { return square_sum(add(in, gr.constant(c))); }, x});
  checks.push_back({"sub", [=](Graph& gr, Var in) { return square_sum(sub(gr.constant(c), in)); }, x});
  checks.push_back({"mul", [=](Graph& gr, Var in) { return sum(mul(mul(in, in), gr.constant(c))); }, x});
  checks.push_back({"scale", [](Graph&, Var in) { return square_sum(scale(in, 1.7)); }, x});
  checks.push_back({"exp", [=](Graph& gr, Var in) { return sum(mul(numerics::exp(in), gr.constant(c))); }, x});
  checks.push_back({"gelu", [=](Graph& gr, Var in) { return sum(mul(gelu(in), gr.constant(c))); }, x});
  checks.push_back({"clamp", [=](Graph& gr, Var in) { return sum(mul(clamp(in, -0.5, 0.5), gr.constant(c))); }, x});
  checks.push_back(
      {"minimum", [=](Graph& gr, Var in) { return sum(mul(minimum(in, gr.constant(c2)), gr.constant(c))); }, x});
  checks.push_back(
      {"minimum_rhs", [=](Graph& gr, Var in) { return sum(mul(minimum(gr.constant(c2), in), gr.constant(c))); }, x});
  checks.push_back({"mul_rows_x", [=](Graph& gr, Var in) { return square_sum(mul_rows(in, gr.constant(g))); }, x});
  checks.push_back({"mul_rows_g", [=](Graph& gr, Var in) { return square_sum(mul_rows(gr.constant(x), in)); }, g});
  checks.push_back(
      {"matmul_lhs", [=](Graph& gr, Var in) { return sum(mul(matmul(in, gr.constant(b)), gr.constant(w5))); }, x});
  checks.push_back({"matmul_rhs", [=](Graph& gr, Var in) { return square_sum(matmul(gr.constant(x), in)); }, b});
  checks.push_back({"matmul_nt_lhs", [=](Graph& gr, Var in) { return square_sum(matmul_nt(in, gr.constant(d))); }, x});
  checks.push_back({"matmul_nt_rhs", [=](Graph& gr, Var in) { return square_sum(matmul_nt(gr.constant(x), in)); }, d});
  checks.push_back({"gather_rows", [=](Graph& gr, Var in) {
                      return sum(mul(gather_rows(in, gather), gr.constant(c)));
                    }, x});
  checks.push_back({"select_rows", [=](Graph& gr, Var in) {
                      return square_sum(mul(select_rows(in, gather), gr.constant(c)));
                    }, x});
  checks.push_back({"slice_cols", [](Graph&, Var in) { return square_sum(slice_cols(in, 1, 2)); }, x});
  checks.push_back({"concat_cols", [](Graph&, Var in) {
                      const std::vector<Var> parts = {slice_cols(in, 2, 2), in, scale(in, 0.5)};
                      return square_sum(concat_cols(parts));
                    }, x});
  checks.push_back({"mean_rows", [](Graph&, Var in) { return square_sum(mean_rows(mul(in, in))); }, x});
  checks.push_back({"pick", [=](Graph&, Var in) { return square_sum(pick(in, picks)); }, x});
  checks.push_back({"rms_norm", [=](Graph& gr, Var in) { return sum(mul(rms_norm(in, 1e-6), gr.constant(c))); }, x});
  checks.push_back({"causal_softmax", [=](Graph& gr, Var in) {
                      return sum(mul(causal_softmax(in), gr.constant(w44)));
                    }, sq});
  checks.push_back({"log_softmax", [=](Graph& gr, Var in) { return sum(mul(log_softmax(in), gr.constant(c))); }, x});
  checks.push_back({"log_softmax_masked", [=](Graph& gr, Var in) {
                      return sum(mul(log_softmax(in, allowed), gr.constant(c_allowed)));
                    }, x});
  checks.push_back({"mean", [](Graph&, Var in) { return mean(mul(in, in)); }, x});
  checks.push_back({"dot", [=](Graph& gr, Var in) { return dot(in, numerics::exp(gr.constant(row))); }, row});
  checks.push_back({"kl_divergence_p", [=](Graph& gr, Var in) {
                      return kl_divergence(log_softmax(in), log_softmax(gr.constant(q)));
                    }, x});
  checks.push_back({"kl_divergence_q", [=](Graph& gr, Var in) {
                      return kl_divergence(log_softmax(gr.constant(q)), log_softmax(in));
                    }, x});
  return checks;
}

policy::Policy formula_policy() {
  auto config = tasks::task_policy_config();
  config.d_model = 8;
  config.n_layers = 2;
  config.n_heads = 2;
  config.max_seq_len = 8;
  const policy::Policy shape_source(config, 0);
  const auto names = shape_source.parameter_names();
  const auto shapes = shape_source.parameters();
  std::vector<policy::NamedTensor> parameters;
  for (std::size_t j = 0; j < names.size(); ++j) {
    const bool gain = names[j].ends_with("ln1") || names[j].ends_with("ln2") || names[j] == "lnf";
    policy::Tensor value(shapes[j]->shape());
    auto data = value.data();
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double index = static_cast<double>(k);
      data[k] = gain ? 1.0 + 0.1 * std::cos(0.5 * index + static_cast<double>(j))
                     : 0.3 * std::sin(0.37 * index + 0.91 * static_cast<double>(j) + 0.1);
    }
    parameters.push_back({names[j], std::move(value)});
  }
  return policy::Policy(config, std::move(parameters));
}

policy::Policy random_policy(std::uint64_t seed, std::size_t d_model, std::size_t n_layers, std::size_t max_seq_len) {
  auto config = tasks::task_policy_config();
  config.d_model = d_model;
  config.n_layers = n_layers;
  config.n_heads = 2;
  config.max_seq_len = max_seq_len;
  return policy::Policy(config, seed);
}

tasks::TaskConfig toy_task_config() {
  tasks::TaskConfig config;
  config.max_value = 20;
  return config;
}

const policy::Policy& toy_policy() {
  static const policy::Policy trained = [] {
    auto config = tasks::task_policy_config();
    config.d_model = 32;
    config.n_layers = 2;
    config.n_heads = 2;
    config.max_seq_len = 64;
    policy::Policy policy(config, 11);
    trainer::SftConfig sft;
    sft.steps = 400;
    sft.batch_size = 8;
    sft.adam.learning_rate = 3e-3;
    sft.max_difficulty = 2;
    sft.task = toy_task_config();
    trainer::sft_warmstart(policy, sft);
    return policy;
  }();
  return trained;
}

std::vector<SolvedTask> toy_solved_tasks(std::size_t count, std::uint64_t stream_seed) {
  std::vector<SolvedTask> solved;
  Rng unused(0);
  for (std::uint64_t i = 0; solved.size() < count && i < 50 * count; ++i) {
    auto task = tasks::stream_task(stream_seed, i, 1, 2, toy_task_config());
    auto generation = policy::sample(toy_policy(), task.prompt, 1.0, 40, policy::DecodeMode::kGreedy, unused);
    if (tasks::compute_reward(generation.tokens, task).accuracy == 1.0) {
      solved.push_back({std::move(task), std::move(generation.tokens)});
    }
  }
  return solved;
}

}  // namespace oar::testing
