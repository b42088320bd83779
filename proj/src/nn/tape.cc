//
// Copyright 2026 The privcnp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "privcnp/nn/tape.h"

#include "privcnp/errors.h"

namespace privcnp::nn {

const Tensor& Var::value() const { return tape->value(id); }

Var Tape::Constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Tape::Leaf(Tensor value, Tensor* sink) {
  Node node;
  node.value = std::move(value);
  node.sink = sink;
  node.needs_grad = sink != nullptr;
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Tape::Push(Tensor value, std::vector<std::size_t> parents,
               BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  if (backward) {
    for (std::size_t p : parents) node.needs_grad |= nodes_[p].needs_grad;
  }
  if (node.needs_grad) {
    node.parents = std::move(parents);
    node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Tensor& Tape::grad(std::size_t id) {
  Node& node = nodes_[id];
  if (node.grad.size() != node.value.size()) {
    node.grad = Tensor(node.value.shape, 0.0);
  }
  return node.grad;
}

void Tape::Backward(Var output) {
  if (output.tape != this) throw DomainError("variable belongs to another tape");
  if (nodes_[output.id].value.size() != 1) {
    throw DomainError("backward needs a one-element output");
  }
  grad(output.id)[0] += 1.0;
  for (std::size_t i = output.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.needs_grad || node.grad.size() == 0) continue;
    if (node.backward) node.backward(*this, i);
    if (node.sink != nullptr) {
      Tensor& sink = *node.sink;
      if (sink.size() != node.grad.size()) {
        throw DomainError("gradient sink shape mismatch");
      }
      for (std::size_t k = 0; k < sink.size(); ++k) sink[k] += node.grad[k];
    }
  }
}

}  // namespace privcnp::nn
