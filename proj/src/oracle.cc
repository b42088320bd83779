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


#include "privcnp/oracle.h"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "privcnp/dpsetconv.h"
#include "privcnp/errors.h"
#include "privcnp/random.h"

namespace privcnp::oracle {
namespace {

gp::Matrix PsiMatrix(std::span<const double> grid_xs,
                     std::span<const double> xs, double lambda) {
  gp::Matrix psi(static_cast<Eigen::Index>(grid_xs.size()),
                 static_cast<Eigen::Index>(xs.size()));
  for (std::size_t j = 0; j < grid_xs.size(); ++j) {
    for (std::size_t n = 0; n < xs.size(); ++n) {
      psi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) =
          dpsetconv::Psi((grid_xs[j] - xs[n]) / lambda);
    }
  }
  return psi;
}

std::vector<double> GridXs(const grid::GridSpec& grid) {
  if (grid.axes.size() != 1) {
    throw DomainError("the closed-form predictor needs a 1-D grid");
  }
  return grid::AxisPoints(grid.axes[0]);
}

}  // namespace

double GpOracleNll(const gp::KernelSpec& spec, const taskgen::Task& task) {
  return gp::MeanNll(gp::GpPosterior(spec, task.context.xs, task.context.ys,
                                     task.target_xs),
                     task.target_ys);
}

double PriorMarginalNll(const gp::KernelSpec& spec, const taskgen::Task& task) {
  return gp::MeanNll(gp::GpPosterior(spec, {}, {}, task.target_xs),
                     task.target_ys);
}

double SawtoothFloorNll(double sigma_n) {
  if (!(sigma_n > 0.0)) throw DomainError("noise scale must be positive");
  return 0.5 * std::log(2.0 * std::numbers::pi * sigma_n * sigma_n) + 0.5;
}

gp::GaussianPrediction LowerBoundPredict(const gp::KernelSpec& spec,
                                         std::span<const double> context_xs,
                                         std::span<const double> signal,
                                         double lambda, double sigma_s,
                                         const grid::GridSpec& grid,
                                         std::span<const double> target_xs) {
  spec.Validate();
  if (!(lambda > 0.0)) throw DomainError("lengthscale must be positive");
  if (!(sigma_s >= 0.0) || !std::isfinite(sigma_s)) {
    throw DomainError("signal noise scale must be finite and non-negative");
  }
  const std::vector<double> grid_xs = GridXs(grid);
  if (signal.size() != grid_xs.size()) {
    throw DomainError("signal does not match the grid");
  }
  const double prior_var =
      gp::KernelEval(spec, 0.0, 0.0, /*include_noise=*/true);
  gp::GaussianPrediction pred;
  pred.means.assign(target_xs.size(), 0.0);
  pred.variances.assign(target_xs.size(), prior_var);
  if (context_xs.empty() && sigma_s == 0.0) return pred;

  const gp::Matrix psi = PsiMatrix(grid_xs, context_xs, lambda);
  const gp::KernelSpec noise_spec{gp::KernelFamily::kEq, lambda, 1.0, 0.0};
  gp::Matrix cov = psi * gp::KernelMatrix(spec, context_xs, true) *
                   psi.transpose();
  cov += sigma_s * sigma_s * gp::KernelMatrix(noise_spec, grid_xs, false);
  const gp::CholeskyFactor chol = gp::Cholesky(cov);
  const auto tri = chol.lower.triangularView<Eigen::Lower>();

  const gp::Matrix cross =
      psi * gp::CrossKernelMatrix(spec, context_xs, target_xs);
  const Eigen::Map<const Eigen::VectorXd> s(
      signal.data(), static_cast<Eigen::Index>(signal.size()));
  Eigen::VectorXd alpha = tri.solve(s);
  tri.transpose().solveInPlace(alpha);
  const Eigen::VectorXd mean = cross.transpose() * alpha;
  const gp::Matrix v = tri.solve(cross);
  const Eigen::VectorXd reduction = v.colwise().squaredNorm().transpose();
  const double floor = 1e-15 * spec.signal_scale * spec.signal_scale;
  for (std::size_t m = 0; m < target_xs.size(); ++m) {
    const auto i = static_cast<Eigen::Index>(m);
    pred.means[m] = mean(i);
    pred.variances[m] = std::max(prior_var - reduction(i), floor);
  }
  return pred;
}

std::vector<double> LowerBoundSignal(const taskgen::Task& task, double lambda,
                                     double sigma_s,
                                     const grid::GridSpec& grid,
                                     std::span<const double> unit_noise) {
  const std::vector<double> grid_xs = GridXs(grid);
  if (unit_noise.size() != grid_xs.size()) {
    throw DomainError("noise field does not match the grid");
  }
  std::vector<double> s(grid_xs.size());
  for (std::size_t j = 0; j < grid_xs.size(); ++j) {
    double acc = 0.0;
    for (std::size_t n = 0; n < task.context.xs.size(); ++n) {
      acc += task.context.ys[n] *
             dpsetconv::Psi((grid_xs[j] - task.context.xs[n]) / lambda);
    }
    s[j] = acc + sigma_s * unit_noise[j];
  }
  return s;
}

double LowerBoundTaskNll(const gp::KernelSpec& spec, const taskgen::Task& task,
                         double lambda, double sigma_s,
                         const grid::GridSpec& grid,
                         std::span<const double> unit_noise) {
  const std::vector<double> s =
      LowerBoundSignal(task, lambda, sigma_s, grid, unit_noise);
  return gp::MeanNll(LowerBoundPredict(spec, task.context.xs, s, lambda,
                                       sigma_s, grid, task.target_xs),
                     task.target_ys);
}

double LowerBoundNll(const gp::KernelSpec& spec,
                     std::span<const taskgen::Task> tasks, double lambda,
                     double sigma_s, const grid::GridSpec& grid, int samples,
                     std::uint64_t seed) {
  if (tasks.empty() || samples < 1) {
    throw DomainError("lower bound needs tasks and at least one sample");
  }
  const grid::GridFactors factors = dpsetconv::NoiseFactors(grid, lambda);
  double total = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (int k = 0; k < samples; ++k) {
      Rng rng = MakeRng(seed, {5, i, static_cast<std::uint64_t>(k)});
      const std::vector<double> e = grid::KroneckerSample(factors, rng);
      total += LowerBoundTaskNll(spec, tasks[i], lambda, sigma_s, grid, e);
    }
  }
  return total / static_cast<double>(tasks.size() * samples);
}

}  // namespace privcnp::oracle
