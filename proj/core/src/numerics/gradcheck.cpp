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

#include "oar/numerics/gradcheck.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "oar/common/error.hpp"

namespace oar::numerics {

namespace {

double evaluate(const ScalarFunction& f, const Tensor& x, const char* where, std::size_t index) {
  Graph graph;
  const double value = f(graph, graph.leaf(x)).value().item();
  if (!std::isfinite(value)) {
    throw Error(std::string("finite_difference_check: non-finite function value at ") + where + " probe of index " +
                std::to_string(index));
  }
  return value;
}

}  // namespace

GradCheckResult finite_difference_check(const ScalarFunction& f, const Tensor& x, double h) {
  require(h > 0.0, "finite_difference_check: step must be positive");
  std::vector<double> analytic;
  {
    Graph graph;
    const Var input = graph.leaf(x);
    const Var loss = f(graph, input);
    if (!std::isfinite(loss.value().item())) {
      throw Error("finite_difference_check: non-finite function value at the base point");
    }
    graph.backward(loss);
    const auto g = graph.grad(input);
    analytic.assign(g.begin(), g.end());
  }
  GradCheckResult result;
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double original = probe[i];
    probe[i] = original + h;
    const double plus = evaluate(f, probe, "+h", i);
    probe[i] = original - h;
    const double minus = evaluate(f, probe, "-h", i);
    probe[i] = original;
    const double numeric = (plus - minus) / (2.0 * h);
    const double err = std::abs(analytic[i] - numeric) / (std::abs(analytic[i]) + 1e-8);
    if (err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_index = i;
    }
  }
  return result;
}

}  // namespace oar::numerics
