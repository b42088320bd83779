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

#include "privcnp/nn/params.h"

#include <cmath>

#include "privcnp/errors.h"

namespace privcnp::nn {

std::size_t ParamStore::Add(const std::string& name, Tensor value) {
  if (Find(name)) throw DomainError("duplicate parameter name " + name);
  names_.push_back(name);
  values_.push_back(std::move(value));
  return values_.size() - 1;
}

std::optional<std::size_t> ParamStore::Find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t ParamStore::Index(const std::string& name) const {
  if (auto i = Find(name)) return *i;
  throw DomainError("unknown parameter " + name);
}

std::size_t ParamStore::TotalSize() const {
  std::size_t n = 0;
  for (const Tensor& t : values_) n += t.size();
  return n;
}

Gradients ParamStore::ZeroGradients() const {
  Gradients g;
  g.reserve(values_.size());
  for (const Tensor& t : values_) g.emplace_back(t.shape, 0.0);
  return g;
}

Binding::Binding(Tape& tape, const ParamStore& store, Gradients* grads)
    : tape_(tape), store_(store), grads_(grads), bound_(store.size()) {
  if (grads_ != nullptr && grads_->size() != store.size()) {
    throw DomainError("gradient buffer does not match parameter store");
  }
}

Var Binding::Get(std::size_t index) {
  if (!bound_.at(index)) {
    bound_[index] = grads_ != nullptr
                        ? tape_.Leaf(store_.value(index), &(*grads_)[index])
                        : tape_.Constant(store_.value(index));
  }
  return *bound_[index];
}

void AccumulateGradients(const Gradients& from, Gradients& into) {
  if (from.size() != into.size()) throw DomainError("gradient count mismatch");
  for (std::size_t p = 0; p < from.size(); ++p) {
    if (from[p].size() != into[p].size()) {
      throw DomainError("gradient shape mismatch");
    }
    for (std::size_t i = 0; i < from[p].size(); ++i) into[p][i] += from[p][i];
  }
}

void ScaleGradients(Gradients& grads, double factor) {
  for (Tensor& g : grads) {
    for (double& v : g.values) v *= factor;
  }
}

void AdamStep(ParamStore& params, const Gradients& grads, AdamState& state) {
  if (grads.size() != params.size()) {
    throw DomainError("Adam: gradient count does not match parameters");
  }
  if (state.first_moment.empty()) {
    state.first_moment = params.ZeroGradients();
    state.second_moment = params.ZeroGradients();
  }
  if (state.first_moment.size() != params.size()) {
    throw DomainError("Adam: optimiser state does not match parameters");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& theta = params.value(p);
    const Tensor& g = grads[p];
    Tensor& m = state.first_moment[p];
    Tensor& v = state.second_moment[p];
    if (g.size() != theta.size() || m.size() != theta.size()) {
      throw DomainError("Adam: shape mismatch for " + params.name(p));
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

}  // namespace privcnp::nn
