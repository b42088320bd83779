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

#include "privcnp/nn/grad_check.h"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "privcnp/random.h"

namespace privcnp::nn {

GradCheckResult GradCheck(const LossClosure& loss, ParamStore& params,
                          const GradCheckOptions& options) {
  Gradients analytic = params.ZeroGradients();
  loss(params, &analytic);

  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params.value(p).size(); ++i) {
      coords.emplace_back(p, i);
    }
  }
  if (coords.size() > options.full_check_limit) {
    Rng rng = MakeRng(options.seed, {0x67636b});
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(std::max<std::size_t>(1, coords.size() / 100));
  }

  GradCheckResult result;
  for (const auto& [p, i] : coords) {
    double& theta = params.value(p)[i];
    const double saved = theta;
    theta = saved + options.step;
    const double up = loss(params, nullptr);
    theta = saved - options.step;
    const double down = loss(params, nullptr);
    theta = saved;
    const double numeric = (up - down) / (2.0 * options.step);
    const double a = analytic[p][i];
    const double denom =
        std::max({std::abs(a), std::abs(numeric), options.floor});
    const double rel = std::abs(a - numeric) / denom;
    ++result.coordinates_checked;
    if (rel > result.max_relative_error || std::isnan(rel)) {
      result.max_relative_error = std::isnan(rel) ? INFINITY : rel;
      result.worst_parameter = params.name(p);
      result.worst_index = i;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace privcnp::nn
