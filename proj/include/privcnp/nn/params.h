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

// Named trainable parameters, gradient buffers and the Adam optimiser.

#ifndef PRIVCNP_NN_PARAMS_H_
#define PRIVCNP_NN_PARAMS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "privcnp/nn/tape.h"
#include "privcnp/nn/tensor.h"

namespace privcnp::nn {

// One gradient tensor per parameter, in store order.
using Gradients = std::vector<Tensor>;

class ParamStore {
 public:
  // Returns the index of the new parameter. Names must be unique.
  std::size_t Add(const std::string& name, Tensor value);

  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Tensor& value(std::size_t i) { return values_[i]; }
  const Tensor& value(std::size_t i) const { return values_[i]; }
  std::optional<std::size_t> Find(const std::string& name) const;
  std::size_t Index(const std::string& name) const;

  std::size_t TotalSize() const;
  Gradients ZeroGradients() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> values_;
};

// Places parameters on a tape on first use. With a gradient buffer the
// parameters become leaves that accumulate into it; without one they are
// constants.
class Binding {
 public:
  Binding(Tape& tape, const ParamStore& store, Gradients* grads);

  Var Get(std::size_t index);
  Var Get(const std::string& name) { return Get(store_.Index(name)); }
  Tape& tape() { return tape_; }

 private:
  Tape& tape_;
  const ParamStore& store_;
  Gradients* grads_;
  std::vector<std::optional<Var>> bound_;
};

void AccumulateGradients(const Gradients& from, Gradients& into);
void ScaleGradients(Gradients& grads, double factor);

struct AdamState {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
};

// One bias-corrected Adam update of every parameter.
void AdamStep(ParamStore& params, const Gradients& grads, AdamState& state);

}  // namespace privcnp::nn

#endif  // PRIVCNP_NN_PARAMS_H_
