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

#include "privcnp/kernel_gp.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "privcnp/errors.h"

namespace privcnp::gp {
namespace {

constexpr double kInitialJitter = 1e-8;
constexpr double kMaxJitter = 1e-4;

double Stationary(const KernelSpec& spec, double r) {
  const double var = spec.signal_scale * spec.signal_scale;
  switch (spec.family) {
    case KernelFamily::kEq:
      return var * std::exp(-0.5 * (r * r) / (spec.lengthscale * spec.lengthscale));
    case KernelFamily::kMatern32: {
      const double s = std::numbers::sqrt3 * std::abs(r) / spec.lengthscale;
      return var * (1.0 + s) * std::exp(-s);
    }
    case KernelFamily::kSawtoothMeta:
      break;
  }
  throw DomainError("sawtooth tasks have no covariance function");
}

}  // namespace

std::string FamilyName(KernelFamily family) {
  switch (family) {
    case KernelFamily::kEq:
      return "eq";
    case KernelFamily::kMatern32:
      return "matern32";
    case KernelFamily::kSawtoothMeta:
      return "sawtooth";
  }
  return "unknown";
}

KernelFamily ParseFamily(const std::string& name) {
  if (name == "eq") return KernelFamily::kEq;
  if (name == "matern32") return KernelFamily::kMatern32;
  if (name == "sawtooth") return KernelFamily::kSawtoothMeta;
  throw DomainError("unknown kernel family '" + name + "'");
}

void KernelSpec::Validate() const {
  if (!(lengthscale > 0.0)) throw DomainError("lengthscale must be positive");
  if (!(signal_scale > 0.0)) throw DomainError("signal scale must be positive");
  if (!(noise_scale >= 0.0)) throw DomainError("noise scale must be >= 0");
}

double KernelEval(const KernelSpec& spec, double x, double x_prime,
                  bool include_noise) {
  double k = Stationary(spec, x - x_prime);
  if (include_noise && x == x_prime) k += spec.noise_scale * spec.noise_scale;
  return k;
}

Matrix KernelMatrix(const KernelSpec& spec, std::span<const double> xs,
                    bool include_noise) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = Stationary(spec, 0.0);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = Stationary(spec, xs[i] - xs[j]);
      k(i, j) = v;
      k(j, i) = v;
    }
    if (include_noise) k(i, i) += spec.noise_scale * spec.noise_scale;
  }
  return k;
}

Matrix CrossKernelMatrix(const KernelSpec& spec, std::span<const double> xs,
                         std::span<const double> ys) {
  Matrix k(static_cast<Eigen::Index>(xs.size()),
           static_cast<Eigen::Index>(ys.size()));
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      k(i, j) = Stationary(spec, xs[i] - ys[j]);
    }
  }
  return k;
}

CholeskyFactor Cholesky(const Matrix& matrix, double jitter_scale) {
  if (matrix.rows() != matrix.cols()) {
    throw DomainError("Cholesky needs a square matrix");
  }
  CholeskyFactor out;
  if (matrix.rows() == 0) return out;
  if (jitter_scale <= 0.0) jitter_scale = matrix.diagonal().maxCoeff();
  Eigen::LLT<Matrix> llt(matrix);
  if (llt.info() == Eigen::Success) {
    out.lower = llt.matrixL();
    if (out.lower.allFinite()) return out;
  }
  for (double rel = kInitialJitter; rel <= kMaxJitter * 1.0001; rel *= 10.0) {
    const double jitter = rel * jitter_scale;
    Matrix jittered = matrix;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) {
      out.lower = llt.matrixL();
      if (!out.lower.allFinite()) continue;
      out.jitter = jitter;
      return out;
    }
  }
  throw NumericalError("matrix is not positive definite after jitter up to " +
                       std::to_string(kMaxJitter * jitter_scale));
}

void LowerMatVec(const Matrix& lower, const double* z, double* out,
                 std::ptrdiff_t stride) {
  const Eigen::Index n = lower.rows();
  // Back to front so the routine may run in place (out == z).
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k <= i; ++k) acc += lower(i, k) * z[k * stride];
    out[i * stride] = acc;
  }
}

std::vector<double> GpSampleWithNoise(const KernelSpec& spec,
                                      std::span<const double> xs,
                                      std::span<const double> z) {
  if (z.size() != xs.size()) throw DomainError("noise length mismatch");
  std::vector<double> ys(xs.size());
  if (xs.empty()) return ys;
  const CholeskyFactor chol = Cholesky(
      KernelMatrix(spec, xs, /*include_noise=*/true),
      spec.signal_scale * spec.signal_scale);
  LowerMatVec(chol.lower, z.data(), ys.data());
  return ys;
}

std::vector<double> GpSample(const KernelSpec& spec,
                             std::span<const double> xs, Rng& rng) {
  const std::vector<double> z = StandardNormalVector(rng, xs.size());
  return GpSampleWithNoise(spec, xs, z);
}

GaussianPrediction GpPosterior(const KernelSpec& spec,
                               std::span<const double> context_xs,
                               std::span<const double> context_ys,
                               std::span<const double> target_xs) {
  if (context_xs.size() != context_ys.size()) {
    throw DomainError("context inputs and outputs differ in length");
  }
  const double prior_var = Stationary(spec, 0.0) +
                           spec.noise_scale * spec.noise_scale;
  GaussianPrediction pred;
  pred.means.assign(target_xs.size(), 0.0);
  pred.variances.assign(target_xs.size(), prior_var);
  if (context_xs.empty()) return pred;

  const CholeskyFactor chol =
      Cholesky(KernelMatrix(spec, context_xs, /*include_noise=*/true),
               spec.signal_scale * spec.signal_scale);
  const auto tri = chol.lower.triangularView<Eigen::Lower>();
  const Eigen::Map<const Eigen::VectorXd> y(context_ys.data(),
                                            static_cast<Eigen::Index>(context_ys.size()));
  Eigen::VectorXd alpha = tri.solve(y);
  tri.transpose().solveInPlace(alpha);
  const Matrix cross = CrossKernelMatrix(spec, context_xs, target_xs);
  const Eigen::VectorXd mean = cross.transpose() * alpha;
  const Matrix v = tri.solve(cross);
  const Eigen::VectorXd reduction = v.colwise().squaredNorm().transpose();
  const double floor = 1e-15 * spec.signal_scale * spec.signal_scale;
  for (std::size_t j = 0; j < target_xs.size(); ++j) {
    pred.means[j] = mean(static_cast<Eigen::Index>(j));
    pred.variances[j] =
        std::max(prior_var - reduction(static_cast<Eigen::Index>(j)), floor);
  }
  return pred;
}

double GaussianNll(double y, double mean, double variance) {
  if (!(variance > 0.0)) {
    throw DomainError("predictive variance must be positive");
  }
  const double r = y - mean;
  return 0.5 * std::log(2.0 * std::numbers::pi * variance) +
         r * r / (2.0 * variance);
}

double MeanNll(const GaussianPrediction& prediction,
               std::span<const double> ys) {
  if (prediction.means.size() != ys.size() ||
      prediction.variances.size() != ys.size()) {
    throw DomainError("prediction and targets differ in length");
  }
  if (ys.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    total += GaussianNll(ys[i], prediction.means[i], prediction.variances[i]);
  }
  return total / static_cast<double>(ys.size());
}

}  // namespace privcnp::gp
