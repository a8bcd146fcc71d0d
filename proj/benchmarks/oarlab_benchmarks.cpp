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


#include <benchmark/benchmark.h>

#include <random>

#include "oar/attribution/scores.hpp"
#include "oar/common/rng.hpp"
#include "oar/numerics/graph.hpp"
#include "oar/numerics/ops.hpp"
#include "oar/policy/policy.hpp"
#include "oar/reshaping/advantages.hpp"
#include "oar/tasks/task.hpp"

namespace {

using oar::policy::Policy;
using oar::policy::TokenId;

Policy bench_policy() {
  auto config = oar::tasks::task_policy_config();
  config.d_model = 48;
  config.n_layers = 4;
  config.n_heads = 4;
  config.max_seq_len = 96;
  return Policy(config, 3);
}

struct Trace {
  std::vector<TokenId> prompt;
  std::vector<TokenId> response;
};

// A gold trace stands in for a sampled response of the same length.
Trace bench_trace() {
  oar::tasks::TaskConfig task;
  task.max_value = 20;
  const auto instance = oar::tasks::generate_task(17, 3, task);
  return {instance.prompt, instance.gold_trace};
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  oar::Rng rng(1);
  std::normal_distribution<double> normal;
  oar::numerics::Tensor a({n, n});
  oar::numerics::Tensor b({n, n});
  for (auto& v : a.data()) v = normal(rng);
  for (auto& v : b.data()) v = normal(rng);
  for (auto _ : state) {
    oar::numerics::Graph graph;
    benchmark::DoNotOptimize(oar::numerics::matmul(graph.constant(a), graph.constant(b)).value().data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(16)->Arg(48)->Arg(96);

void BM_ForwardBackward(benchmark::State& state) {
  const auto policy = bench_policy();
  const auto trace = bench_trace();
  const auto full = oar::policy::join(trace.prompt, trace.response);
  for (auto _ : state) {
    oar::numerics::Graph graph;
    const auto result = policy.forward(graph, full);
    graph.backward(oar::numerics::mean(result.logits));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(full.size()));
}
BENCHMARK(BM_ForwardBackward)->Unit(benchmark::kMillisecond);

void BM_Logits(benchmark::State& state) {
  const auto policy = bench_policy();
  const auto trace = bench_trace();
  const auto full = oar::policy::join(trace.prompt, trace.response);
  for (auto _ : state) {
    benchmark::DoNotOptimize(policy.logits(full).data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(full.size()));
}
BENCHMARK(BM_Logits)->Unit(benchmark::kMillisecond);

void BM_Sample(benchmark::State& state) {
  const auto policy = bench_policy();
  const auto trace = bench_trace();
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto rng = oar::make_rng(5, {i++});
    benchmark::DoNotOptimize(
        oar::policy::sample(policy, trace.prompt, 1.0, 60, oar::policy::DecodeMode::kStochastic, rng).tokens.size());
  }
}
BENCHMARK(BM_Sample)->Unit(benchmark::kMillisecond);

void BM_OarP(benchmark::State& state) {
  const auto policy = bench_policy();
  const auto trace = bench_trace();
  oar::attribution::AttributionConfig config;
  config.serial = state.range(0) == 0;
  config.batch_budget = static_cast<std::size_t>(std::max<std::int64_t>(1, state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oar::attribution::oar_p_scores(policy, trace.prompt, trace.response, config).data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.response.size()));
}
BENCHMARK(BM_OarP)->ArgName("budget")->Arg(0)->Arg(1)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_OarG(benchmark::State& state) {
  const auto policy = bench_policy();
  const auto trace = bench_trace();
  const oar::attribution::AttributionConfig config;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        oar::attribution::oar_g_scores(policy, trace.prompt, trace.response, config, seed++).data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.response.size()));
}
BENCHMARK(BM_OarG)->Unit(benchmark::kMillisecond);

void BM_Reshape(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  oar::Rng rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> importance(length);
  for (auto& v : importance) v = unit(rng);
  const oar::reshaping::GatingConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oar::reshaping::reshape(0.5, importance, config, false).token_advantages.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(length));
}
BENCHMARK(BM_Reshape)->Arg(64)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
