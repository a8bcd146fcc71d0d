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

#ifndef OAR_NUMERICS_GRAPH_HPP
#define OAR_NUMERICS_GRAPH_HPP

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "oar/numerics/tensor.hpp"

namespace oar::numerics {

class Graph;

/// Handle to one node of a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;

  [[nodiscard]] bool valid() const noexcept { return graph_ != nullptr; }
  [[nodiscard]] Graph& graph() const { return *graph_; }
  [[nodiscard]] std::uint32_t id() const noexcept { return id_; }
  [[nodiscard]] const Tensor& value() const;
  [[nodiscard]] const Shape& shape() const { return value().shape(); }
  [[nodiscard]] std::span<const double> grad() const;

 private:
  friend class Graph;
  Var(Graph* graph, std::uint32_t id) : graph_(graph), id_(id) {}

  Graph* graph_ = nullptr;
  std::uint32_t id_ = 0;
};

/// Tape-based reverse-mode autodiff over Tensor values.
///
/// Nodes are appended in creation order, which is a topological order, and
/// backward() walks them once in reverse. Leaves are either copies of model
/// parameters or designated input activations (e.g. token embeddings).
/// A graph owns all of its state; independent graphs can be used from
/// different threads.
class Graph {
 public:
  /// Propagates a node's output gradient into its parents' buffers.
  using Backward = std::function<void(Graph&, std::span<const double>)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  /// A value that never receives a gradient.
  Var constant(Tensor value);
  /// A differentiable leaf (parameter or input activation).
  Var leaf(Tensor value);

  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] const Tensor& value(Var v) const { return nodes_[v.id()].value; }
  [[nodiscard]] bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  [[nodiscard]] bool is_leaf(Var v) const { return nodes_[v.id()].leaf; }

  /// dLoss/dv from the last backward(); zeros for leaves the loss does not reach.
  [[nodiscard]] std::span<const double> grad(Var v) const;

  /// Accumulates dLoss/dnode for every node reachable from `loss`.
  /// Throws ContractViolation unless `loss` holds exactly one element.
  void backward(Var loss);

  /// Drops all gradients so backward() can be re-run from scratch.
  void reset_grads();

  /// All differentiable leaves in creation order.
  [[nodiscard]] std::vector<Var> leaves() const;

  // -- op authoring ---------------------------------------------------------

  /// Appends a node computed from `parents`. `backward` is invoked only when
  /// some parent requires a gradient.
  Var record(Tensor value, std::span<const Var> parents, Backward backward);
  Var record(Tensor value, std::initializer_list<Var> parents, Backward backward) {
    return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()), std::move(backward));
  }

  /// Zero-initialized gradient accumulator of `v`, allocated on first use.
  std::span<double> grad_buffer(Var v);

 private:
  struct Node {
    Tensor value;
    std::vector<double> grad;
    Backward backward;
    bool requires_grad = false;
    bool leaf = false;
  };

  Var push(Node node);

  std::vector<Node> nodes_;
};

}  // namespace oar::numerics

#endif  // OAR_NUMERICS_GRAPH_HPP
