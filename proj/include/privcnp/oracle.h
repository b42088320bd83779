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


// Reference predictors: the exact GP posterior, the sawtooth noise floor and
// the closed-form predictor for the signal-noise-only DP SetConv.

#ifndef PRIVCNP_ORACLE_H_
#define PRIVCNP_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "privcnp/grid_sampler.h"
#include "privcnp/kernel_gp.h"
#include "privcnp/taskgen.h"

namespace privcnp::oracle {

// Mean target NLL of the exact posterior predictive.
double GpOracleNll(const gp::KernelSpec& spec, const taskgen::Task& task);

// Mean target NLL of the context-free predictor N(0, signal^2 + noise^2).
double PriorMarginalNll(const gp::KernelSpec& spec, const taskgen::Task& task);

// 0.5 ln(2 pi sigma_n^2) + 0.5.
double SawtoothFloorNll(double sigma_n);

// Observation model on the grid g_1..g_G:
//
//   s = Psi y + sigma_s e,   Psi_jn = psi((g_j - x_n) / lambda),
//   e ~ N(0, K_grid),        K_grid(g, g') = exp(-(g - g')^2 / (2 lambda^2)),
//   y ~ N(0, K_ctx + sigma_n^2 I).
//
// Returns the Gaussian predictive of noisy y* given s:
//
//   mean = B^T S^-1 s,  var = k(x*, x*) + sigma_n^2 - diag(B^T S^-1 B),
//   S = Psi (K_ctx + sigma_n^2 I) Psi^T + sigma_s^2 K_grid,  B = Psi K_ctx*.
gp::GaussianPrediction LowerBoundPredict(const gp::KernelSpec& spec,
                                         std::span<const double> context_xs,
                                         std::span<const double> signal,
                                         double lambda, double sigma_s,
                                         const grid::GridSpec& grid,
                                         std::span<const double> target_xs);

// Signal channel s for a task given a unit noise field on the grid.
std::vector<double> LowerBoundSignal(const taskgen::Task& task, double lambda,
                                     double sigma_s,
                                     const grid::GridSpec& grid,
                                     std::span<const double> unit_noise);

// Mean target NLL of LowerBoundPredict for one task and one noise field.
double LowerBoundTaskNll(const gp::KernelSpec& spec, const taskgen::Task& task,
                         double lambda, double sigma_s,
                         const grid::GridSpec& grid,
                         std::span<const double> unit_noise);

// Average over tasks and `samples` noise draws per task of
// LowerBoundTaskNll. Draw k of task i uses MakeRng(seed, {5, i, k}).
double LowerBoundNll(const gp::KernelSpec& spec,
                     std::span<const taskgen::Task> tasks, double lambda,
                     double sigma_s, const grid::GridSpec& grid, int samples,
                     std::uint64_t seed);

}  // namespace privcnp::oracle

#endif  // PRIVCNP_ORACLE_H_
