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

#ifndef OAR_NUMERICS_GRADCHECK_HPP
#define OAR_NUMERICS_GRADCHECK_HPP

#include <cstddef>
#include <functional>

#include "oar/numerics/graph.hpp"

namespace oar::numerics {

/// Builds a scalar loss from a single input leaf.
using ScalarFunction = std::function<Var(Graph&, Var)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
};

/// Compares the backward() gradient of `f` at `x` with central differences.
///
/// Error per coordinate is |g_i - fd_i| / (|g_i| + 1e-8). Throws Error naming
/// the coordinate when f is non-finite at a probe, ContractViolation if h <= 0.
GradCheckResult finite_difference_check(const ScalarFunction& f, const Tensor& x, double h);

}  // namespace oar::numerics

#endif  // OAR_NUMERICS_GRADCHECK_HPP
