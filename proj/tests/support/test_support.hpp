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


#ifndef OARLAB_TESTS_TEST_SUPPORT_HPP
#define OARLAB_TESTS_TEST_SUPPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "oar/numerics/gradcheck.hpp"

#include "oar/policy/policy.hpp"
#include "oar/tasks/task.hpp"

namespace oar::testing {

/// One differentiable-op scenario for finite-difference checking.
struct OpCheck {
  std::string name;
  numerics::ScalarFunction function;
  numerics::Tensor input;
};

/// Scenarios covering every autodiff op, with inputs and constants drawn from `seed`.
std::vector<OpCheck> op_gradient_checks(std::uint64_t seed);

/// d_model 8, two layers, two heads, eight positions; every parameter is a
/// closed-form function of its flat index so an outside implementation can
/// reproduce the forward pass.
policy::Policy formula_policy();

/// Randomly initialized task-vocabulary policy.
policy::Policy random_policy(std::uint64_t seed, std::size_t d_model = 16, std::size_t n_layers = 2,
                             std::size_t max_seq_len = 64);

/// Task settings of the toy checkpoint.
tasks::TaskConfig toy_task_config();

/// Small policy warm-started on gold traces; trained once per process.
const policy::Policy& toy_policy();

/// Tasks the toy policy answers correctly by greedy decoding, with those responses.
struct SolvedTask {
  tasks::TaskInstance task;
  std::vector<policy::TokenId> response;
};
std::vector<SolvedTask> toy_solved_tasks(std::size_t count, std::uint64_t stream_seed);

}  // namespace oar::testing

#endif  // OARLAB_TESTS_TEST_SUPPORT_HPP
