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

// Covariance functions, dense GP sampling and exact GP regression.

#ifndef PRIVCNP_KERNEL_GP_H_
#define PRIVCNP_KERNEL_GP_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "privcnp/random.h"

namespace privcnp::gp {

using Matrix = Eigen::MatrixXd;

enum class KernelFamily {
  kEq,
  kMatern32,
  // Placeholder used to tag sawtooth tasks; not a covariance function.
  kSawtoothMeta,
};

std::string FamilyName(KernelFamily family);
KernelFamily ParseFamily(const std::string& name);

struct KernelSpec {
  KernelFamily family = KernelFamily::kEq;
  double lengthscale = 1.0;
  double signal_scale = 1.0;
  double noise_scale = 0.0;

  void Validate() const;
};

struct GaussianPrediction {
  std::vector<double> means;
  std::vector<double> variances;
};

// k(x, x'), plus noise_scale^2 when include_noise and x == x'.
double KernelEval(const KernelSpec& spec, double x, double x_prime,
                  bool include_noise);

// Symmetric matrix over xs. Observation noise, when requested, is added on the
// index diagonal so that repeated inputs still receive independent noise.
Matrix KernelMatrix(const KernelSpec& spec, std::span<const double> xs,
                    bool include_noise);
// Noise-free cross-covariance k(xs_i, ys_j).
Matrix CrossKernelMatrix(const KernelSpec& spec, std::span<const double> xs,
                         std::span<const double> ys);

struct CholeskyFactor {
  Matrix lower;
  double jitter = 0.0;  // amount added to the diagonal, 0 if none was needed
};

// Lower Cholesky factor. If the plain factorisation fails, jitter of
// 1e-8 * scale is added to the diagonal and multiplied by 10 up to
// 1e-4 * scale. scale defaults to the largest diagonal entry.
// Throws NumericalError if every attempt fails.
CholeskyFactor Cholesky(const Matrix& matrix, double jitter_scale = -1.0);

// L z for lower-triangular L, accumulating each row in ascending column
// order. Shared by the dense and grid samplers so their results agree bitwise.
void LowerMatVec(const Matrix& lower, const double* z, double* out,
                 std::ptrdiff_t stride = 1);

// ys = L z with L the factor of the noise-inclusive kernel matrix and
// z ~ N(0, I) drawn from rng in index order.
std::vector<double> GpSample(const KernelSpec& spec,
                             std::span<const double> xs, Rng& rng);
// Same with a caller-supplied standard normal vector.
std::vector<double> GpSampleWithNoise(const KernelSpec& spec,
                                      std::span<const double> xs,
                                      std::span<const double> z);

// Posterior predictive of noisy observations at target_xs. Variances include
// noise_scale^2.
GaussianPrediction GpPosterior(const KernelSpec& spec,
                               std::span<const double> context_xs,
                               std::span<const double> context_ys,
                               std::span<const double> target_xs);

// 0.5 ln(2 pi var) + (y - mean)^2 / (2 var).
double GaussianNll(double y, double mean, double variance);

// Mean of GaussianNll over the prediction.
double MeanNll(const GaussianPrediction& prediction,
               std::span<const double> ys);

}  // namespace privcnp::gp

#endif  // PRIVCNP_KERNEL_GP_H_
