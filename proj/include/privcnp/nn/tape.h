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

// Reverse-mode differentiation over a linear tape.
//
// Every operation appends a node holding its forward value and a closure that
// pushes the node's gradient to its parents. Nodes are only differentiated if
// some ancestor is a leaf created with a gradient sink; constants cost nothing
// on the backward pass. A tape is single-threaded; use one tape per task.

#ifndef PRIVCNP_NN_TAPE_H_
#define PRIVCNP_NN_TAPE_H_

#include <cstddef>
#include <functional>
#include <vector>

#include "privcnp/nn/tensor.h"

namespace privcnp::nn {

class Tape;

// Handle to a tape node.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  double scalar() const { return value()[0]; }
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Tensor value);
  // The gradient of this leaf is added into *sink by Backward.
  Var Leaf(Tensor value, Tensor* sink);
  // Appends an op node. backward may be empty for non-differentiable ops.
  Var Push(Tensor value, std::vector<std::size_t> parents, BackwardFn backward);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  // Gradient buffer of a node, allocated as zeros on first use.
  Tensor& grad(std::size_t id);

  // Seeds d(output)/d(output) = 1 for a one-element output and sweeps the
  // tape backwards.
  void Backward(Var output);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    Tensor* sink = nullptr;
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;
};

}  // namespace privcnp::nn

#endif  // PRIVCNP_NN_TAPE_H_
