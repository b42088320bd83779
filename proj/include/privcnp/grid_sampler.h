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

// Exact GP sampling on regular D-dimensional grids for product kernels.
//
// With k(z, z') = prod_d k_d(z_d, z'_d) the grid covariance is the Kronecker
// product of the per-axis matrices K_d, so a sample is obtained by applying
// each Cholesky factor L_d along its own axis of an i.i.d. normal array. Only
// the N_d x N_d factors are ever formed.

#ifndef PRIVCNP_GRID_SAMPLER_H_
#define PRIVCNP_GRID_SAMPLER_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "privcnp/kernel_gp.h"
#include "privcnp/random.h"

namespace privcnp::grid {

// Axis d holds points origin + n * spacing for n = 0 .. count-1.
struct GridAxis {
  double origin = 0.0;
  double spacing = 1.0;
  int count = 1;

  double Coordinate(int n) const { return origin + n * spacing; }
};

struct GridSpec {
  std::vector<GridAxis> axes;

  void Validate() const;
  std::size_t dims() const { return axes.size(); }
  std::size_t size() const;

  // Axis list "origin:spacing:count[,origin:spacing:count...]".
  static GridSpec Parse(const std::string& text);
  // One axis covering [lo, hi] with points_per_unit points per unit length;
  // both end points are included.
  static GridSpec Window1d(double lo, double hi, int points_per_unit);
};

// Every grid point, row-major in the axis indices (last axis fastest).
std::vector<std::vector<double>> GridPoints(const GridSpec& grid);
// Coordinates of a one-axis grid.
std::vector<double> AxisPoints(const GridAxis& axis);

using Kernel1d = std::function<double(double, double)>;

// Unit-amplitude RBF exp(-(x - x')^2 / (2 lengthscale^2)).
Kernel1d RbfKernel(double lengthscale);

struct GridFactors {
  GridSpec grid;
  std::vector<Kernel1d> kernels;
  std::vector<gp::Matrix> covariances;
  std::vector<gp::Matrix> factors;
};

// Per-axis covariance matrices K_d and their Cholesky factors.
GridFactors PerDimFactors(const GridSpec& grid,
                          std::span<const Kernel1d> kernels);

// Applies the factors to a row-major noise array in place, last axis first.
void KroneckerApply(const GridFactors& factors, std::span<double> field);

// Draws i.i.d. normals in row-major order and applies the factors.
std::vector<double> KroneckerSample(const GridFactors& factors, Rng& rng);

// Largest number of grid points KroneckerReconstructionCheck accepts.
inline constexpr std::size_t kMaxReconstructionPoints = 4096;

// Dense verification of the Kronecker structure on a small grid. Returns the
// larger of
//   max |(kron_d K_d) - K_full|   with K_full built pointwise from the
//                                 product kernel, and
//   max |(kron_d L_d)(kron_d L_d)^T - kron_d K_d|.
// Throws RefusalError for grids above kMaxReconstructionPoints.
double KroneckerReconstructionCheck(const GridFactors& factors);

// Dense Kronecker product of a list of matrices, first factor outermost.
gp::Matrix KroneckerProduct(std::span<const gp::Matrix> mats);

}  // namespace privcnp::grid

#endif  // PRIVCNP_GRID_SAMPLER_H_
