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

#include "privcnp/grid_sampler.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "privcnp/errors.h"

namespace privcnp::grid {

void GridSpec::Validate() const {
  if (axes.empty()) throw DomainError("grid needs at least one axis");
  for (const GridAxis& a : axes) {
    if (!(a.spacing > 0.0)) throw DomainError("grid spacing must be positive");
    if (a.count < 1) throw DomainError("grid axis needs at least one point");
  }
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const GridAxis& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

GridSpec GridSpec::Parse(const std::string& text) {
  GridSpec spec;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ',')) {
    GridAxis axis;
    char c1 = 0;
    char c2 = 0;
    std::stringstream in(item);
    if (!(in >> axis.origin >> c1 >> axis.spacing >> c2 >> axis.count) ||
        c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
      throw DomainError("bad grid axis '" + item +
                        "', expected origin:spacing:count");
    }
    spec.axes.push_back(axis);
  }
  spec.Validate();
  return spec;
}

GridSpec GridSpec::Window1d(double lo, double hi, int points_per_unit) {
  if (!(hi > lo) || points_per_unit < 1) {
    throw DomainError("bad discretisation window");
  }
  GridAxis axis;
  axis.origin = lo;
  axis.spacing = 1.0 / points_per_unit;
  axis.count =
      static_cast<int>(std::lround((hi - lo) * points_per_unit)) + 1;
  return GridSpec{{axis}};
}

std::vector<double> AxisPoints(const GridAxis& axis) {
  std::vector<double> xs(static_cast<std::size_t>(axis.count));
  for (int n = 0; n < axis.count; ++n) xs[n] = axis.Coordinate(n);
  return xs;
}

std::vector<std::vector<double>> GridPoints(const GridSpec& grid) {
  grid.Validate();
  const std::size_t total = grid.size();
  const std::size_t dims = grid.dims();
  std::vector<std::vector<double>> points(total, std::vector<double>(dims));
  std::vector<int> index(dims, 0);
  for (std::size_t p = 0; p < total; ++p) {
    for (std::size_t d = 0; d < dims; ++d) {
      points[p][d] = grid.axes[d].Coordinate(index[d]);
    }
    for (std::size_t d = dims; d-- > 0;) {
      if (++index[d] < grid.axes[d].count) break;
      index[d] = 0;
    }
  }
  return points;
}

Kernel1d RbfKernel(double lengthscale) {
  return [lengthscale](double x, double y) {
    const double r = x - y;
    return 1.0 * std::exp(-0.5 * (r * r) / (lengthscale * lengthscale));
  };
}

GridFactors PerDimFactors(const GridSpec& grid,
                          std::span<const Kernel1d> kernels) {
  grid.Validate();
  if (kernels.size() != grid.dims()) {
    throw DomainError("need one univariate kernel per grid axis");
  }
  GridFactors out;
  out.grid = grid;
  out.kernels.assign(kernels.begin(), kernels.end());
  for (std::size_t d = 0; d < grid.dims(); ++d) {
    const std::vector<double> xs = AxisPoints(grid.axes[d]);
    const auto n = static_cast<Eigen::Index>(xs.size());
    gp::Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, i) = kernels[d](xs[i], xs[i]);
      for (Eigen::Index j = 0; j < i; ++j) {
        const double v = kernels[d](xs[i], xs[j]);
        k(i, j) = v;
        k(j, i) = v;
      }
    }
    out.factors.push_back(gp::Cholesky(k).lower);
    out.covariances.push_back(std::move(k));
  }
  return out;
}

void KroneckerApply(const GridFactors& factors, std::span<double> field) {
  const GridSpec& grid = factors.grid;
  if (field.size() != grid.size() ||
      factors.factors.size() != grid.dims()) {
    throw DomainError("noise array does not match the grid");
  }
  for (std::size_t d = 0; d < grid.dims(); ++d) {
    if (factors.factors[d].rows() != grid.axes[d].count) {
      throw DomainError("factor size does not match grid axis");
    }
  }
  // inner = product of the axis sizes after d, outer = before d.
  for (std::size_t d = grid.dims(); d-- > 0;) {
    const auto len = static_cast<std::size_t>(grid.axes[d].count);
    std::size_t inner = 1;
    for (std::size_t e = d + 1; e < grid.dims(); ++e) {
      inner *= static_cast<std::size_t>(grid.axes[e].count);
    }
    const std::size_t outer = field.size() / (len * inner);
    const gp::Matrix& lower = factors.factors[d];
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        double* fiber = field.data() + o * len * inner + i;
        gp::LowerMatVec(lower, fiber, fiber,
                        static_cast<std::ptrdiff_t>(inner));
      }
    }
  }
}

std::vector<double> KroneckerSample(const GridFactors& factors, Rng& rng) {
  std::vector<double> field = StandardNormalVector(rng, factors.grid.size());
  KroneckerApply(factors, field);
  return field;
}

gp::Matrix KroneckerProduct(std::span<const gp::Matrix> mats) {
  gp::Matrix out = gp::Matrix::Ones(1, 1);
  for (const gp::Matrix& m : mats) {
    gp::Matrix next(out.rows() * m.rows(), out.cols() * m.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        next.block(i * m.rows(), j * m.cols(), m.rows(), m.cols()) =
            out(i, j) * m;
      }
    }
    out = std::move(next);
  }
  return out;
}

double KroneckerReconstructionCheck(const GridFactors& factors) {
  const GridSpec& grid = factors.grid;
  const std::size_t total = grid.size();
  if (total > kMaxReconstructionPoints) {
    throw RefusalError("grid too large for a dense reconstruction check");
  }
  const gp::Matrix kron_k = KroneckerProduct(factors.covariances);
  const gp::Matrix kron_l = KroneckerProduct(factors.factors);

  const auto points = GridPoints(grid);
  const auto n = static_cast<Eigen::Index>(total);
  gp::Matrix full(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double k = 1.0;
      for (std::size_t d = 0; d < grid.dims(); ++d) {
        k *= factors.kernels[d](points[i][d], points[j][d]);
      }
      full(i, j) = k;
    }
  }
  const double structure = (kron_k - full).cwiseAbs().maxCoeff();
  const double factor =
      (kron_l * kron_l.transpose() - kron_k).cwiseAbs().maxCoeff();
  return std::max(structure, factor);
}

}  // namespace privcnp::grid
