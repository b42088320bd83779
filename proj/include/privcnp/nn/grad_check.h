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

// Finite-difference verification of reverse-mode gradients.

#ifndef PRIVCNP_NN_GRAD_CHECK_H_
#define PRIVCNP_NN_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <string>

#include "privcnp/nn/params.h"

namespace privcnp::nn {

// Evaluates a scalar loss at the given parameters. When grads is non-null the
// closure must also add d(loss)/d(params) into it.
using LossClosure = std::function<double(const ParamStore&, Gradients*)>;

struct GradCheckOptions {
  double step = 1e-5;
  // Relative errors are |analytic - numeric| / max(|analytic|, |numeric|,
  // floor), so coordinates with tiny gradients are judged absolutely.
  double floor = 1e-3;
  // Above this many coordinates only a random 1% subsample is checked.
  std::size_t full_check_limit = 10000;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Central differences against the closure's reverse-mode gradient.
// params is perturbed in place and restored before returning.
GradCheckResult GradCheck(const LossClosure& loss, ParamStore& params,
                          const GradCheckOptions& options = {});

}  // namespace privcnp::nn

#endif  // PRIVCNP_NN_GRAD_CHECK_H_
