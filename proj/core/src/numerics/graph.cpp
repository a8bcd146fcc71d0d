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

#include "oar/numerics/graph.hpp"

#include <string>

#include "oar/common/error.hpp"

namespace oar::numerics {

const Tensor& Var::value() const { return graph_->value(*this); }

std::span<const double> Var::grad() const { return graph_->grad(*this); }

Var Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Graph::constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  node.leaf = true;
  return push(std::move(node));
}

Var Graph::leaf(Tensor value) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = true;
  node.leaf = true;
  return push(std::move(node));
}

Var Graph::record(Tensor value, std::span<const Var> parents, Backward backward) {
  Node node;
  node.value = std::move(value);
  for (const auto& p : parents) {
    require(p.graph_ == this, "op mixes variables from different graphs");
    node.requires_grad = node.requires_grad || nodes_[p.id()].requires_grad;
  }
  if (node.requires_grad) {
    node.backward = std::move(backward);
  }
  return push(std::move(node));
}

std::span<double> Graph::grad_buffer(Var v) {
  auto& node = nodes_[v.id()];
  if (node.grad.empty()) {
    node.grad.assign(node.value.size(), 0.0);
  }
  return node.grad;
}

std::span<const double> Graph::grad(Var v) const {
  const auto& node = nodes_[v.id()];
  require(node.grad.size() == node.value.size(), "no gradient recorded for node " + std::to_string(v.id()));
  return node.grad;
}

void Graph::backward(Var loss) {
  require(loss.graph_ == this, "loss belongs to a different graph");
  require(value(loss).size() == 1,
          "backward() needs a scalar loss, got shape " + to_string(value(loss).shape()));
  grad_buffer(loss)[0] += 1.0;
  for (std::int64_t i = loss.id(); i >= 0; --i) {
    auto& node = nodes_[static_cast<std::size_t>(i)];
    if (!node.requires_grad || node.grad.empty() || !node.backward) {
      continue;
    }
    node.backward(*this, node.grad);
  }
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].leaf && nodes_[i].requires_grad) {
      grad_buffer(Var(this, i));
    }
  }
}

void Graph::reset_grads() {
  for (auto& node : nodes_) {
    node.grad.clear();
  }
}

std::vector<Var> Graph::leaves() const {
  std::vector<Var> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].leaf && nodes_[i].requires_grad) {
      out.push_back(Var(const_cast<Graph*>(this), i));
    }
  }
  return out;
}

}  // namespace oar::numerics
