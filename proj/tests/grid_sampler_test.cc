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

#include <chrono>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "privcnp/errors.h"
#include "privcnp/kernel_gp.h"
#include "privcnp/random.h"

namespace privcnp::grid {
namespace {

Kernel1d Identity() {
  return [](double a, double b) { return a == b ? 1.0 : 0.0; };
}

GridFactors RbfFactors(const GridSpec& grid, double lengthscale) {
  const std::vector<Kernel1d> kernels(grid.dims(), RbfKernel(lengthscale));
  return PerDimFactors(grid, kernels);
}

TEST(GridPoints, Examples) {
  const GridSpec one = GridSpec::Parse("0:0.5:3");
  EXPECT_EQ(GridPoints(one), (std::vector<std::vector<double>>{{0}, {0.5}, {1}}));
  const GridSpec single = GridSpec::Parse("1.5:1:1,-2:1:1");
  EXPECT_EQ(GridPoints(single), (std::vector<std::vector<double>>{{1.5, -2}}));
  const GridSpec square = GridSpec::Parse("0:1:2,0:1:2");
  EXPECT_EQ(GridPoints(square),
            (std::vector<std::vector<double>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(GridSpec, ParseAndWindow) {
  EXPECT_THROW(GridSpec::Parse("0:0:3"), DomainError);
  EXPECT_THROW(GridSpec::Parse("0:1:0"), DomainError);
  EXPECT_THROW(GridSpec::Parse("garbage"), DomainError);
  const GridSpec w = GridSpec::Window1d(-7, 7, 32);
  EXPECT_EQ(w.axes[0].count, 449);
  EXPECT_DOUBLE_EQ(w.axes[0].Coordinate(448), 7.0);
}

TEST(PerDimFactors, Examples) {
  const GridSpec single = GridSpec::Parse("0.3:1:1");
  const Kernel1d k = [](double, double) { return 2.25; };
  const GridFactors f = PerDimFactors(single, std::span(&k, 1));
  EXPECT_DOUBLE_EQ(f.factors[0](0, 0), 1.5);

  const GridSpec g = GridSpec::Parse("0:1:4,0:1:3");
  const std::vector<Kernel1d> ids = {Identity(), Identity()};
  const GridFactors fi = PerDimFactors(g, ids);
  EXPECT_TRUE(fi.factors[0].isIdentity(0.0));
  EXPECT_TRUE(fi.factors[1].isIdentity(0.0));

  const GridFactors rbf = RbfFactors(GridSpec::Parse("0:0.4:4"), 0.7);
  const gp::Matrix& l = rbf.factors[0];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double d = 0.4 * (i - j);
      EXPECT_NEAR((l * l.transpose())(i, j), std::exp(-d * d / (2 * 0.49)),
                  1e-12);
    }
  }
}

TEST(KroneckerSample, IdentityFactorsReturnRawNoise) {
  const GridSpec g = GridSpec::Parse("0:1:3,0:1:4");
  const std::vector<Kernel1d> ids = {Identity(), Identity()};
  const GridFactors f = PerDimFactors(g, ids);
  Rng a = MakeRng(3, {});
  Rng b = MakeRng(3, {});
  const std::vector<double> field = KroneckerSample(f, a);
  EXPECT_EQ(field, StandardNormalVector(b, 12));
}

TEST(KroneckerSample, OneDimensionalMatchesDenseSample) {
  const GridSpec g = GridSpec::Parse("-1:0.125:17");
  const GridFactors f = RbfFactors(g, 0.3);
  Rng a = MakeRng(8, {});
  const std::vector<double> field = KroneckerSample(f, a);
  Rng b = MakeRng(8, {});
  const std::vector<double> z = StandardNormalVector(b, 17);
  const gp::KernelSpec spec{gp::KernelFamily::kEq, 0.3, 1.0, 0.0};
  EXPECT_EQ(field, gp::GpSampleWithNoise(spec, AxisPoints(g.axes[0]), z));
}

TEST(KroneckerSample, MonteCarloCovarianceOnThreeByTwo) {
  const GridSpec g = GridSpec::Parse("0:0.5:3,1:0.8:2");
  const GridFactors f = RbfFactors(g, 0.6);
  const std::vector<std::vector<double>> pts = GridPoints(g);
  const int n = 200000;
  std::vector<double> sum(36, 0.0);
  Rng rng = MakeRng(13, {});
  for (int s = 0; s < n; ++s) {
    const std::vector<double> v = KroneckerSample(f, rng);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) sum[i * 6 + j] += v[i] * v[j];
    }
  }
  auto k = [&](int i, int j) {
    double out = 1.0;
    for (int d = 0; d < 2; ++d) {
      const double r = pts[i][d] - pts[j][d];
      out *= std::exp(-r * r / (2 * 0.36));
    }
    return out;
  };
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double se = std::sqrt((k(i, i) * k(j, j) + k(i, j) * k(i, j)) / n);
      EXPECT_NEAR(sum[i * 6 + j] / n, k(i, j), 4 * se) << i << "," << j;
    }
  }
}

TEST(KroneckerSample, LinearInNoise) {
  const GridSpec g = GridSpec::Parse("0:0.25:5,0:0.5:3");
  const GridFactors f = RbfFactors(g, 0.4);
  Rng rng = MakeRng(2, {});
  std::vector<double> z = StandardNormalVector(rng, 15);
  std::vector<double> scaled = z;
  for (double& v : scaled) v *= 4.0;
  KroneckerApply(f, z);
  KroneckerApply(f, scaled);
  for (int i = 0; i < 15; ++i) EXPECT_EQ(scaled[i], 4.0 * z[i]);
}

TEST(KroneckerReconstruction, SmallGrids) {
  EXPECT_LT(KroneckerReconstructionCheck(RbfFactors(GridSpec::Parse("0:0.5:2,0:0.5:2"), 0.4)),
            1e-10);
  EXPECT_LT(KroneckerReconstructionCheck(RbfFactors(GridSpec::Parse("0:0.1:9"), 0.4)),
            1e-14);
  EXPECT_LT(KroneckerReconstructionCheck(
                RbfFactors(GridSpec::Parse("0:0.5:4,0:0.5:4,0:0.5:2"), 0.4)),
            1e-10);
}

TEST(KroneckerReconstruction, RefusesLargeGrids) {
  const GridFactors f = RbfFactors(GridSpec::Parse("0:0.1:65,0:0.1:64"), 0.4);
  EXPECT_THROW(KroneckerReconstructionCheck(f), RefusalError);
}

TEST(KroneckerSample, LargeGridIsFast) {
  const auto start = std::chrono::steady_clock::now();
  const GridFactors f = RbfFactors(GridSpec::Parse("0:0.05:64,0:0.05:64"), 0.2);
  Rng rng = MakeRng(1, {});
  const std::vector<double> field = KroneckerSample(f, rng);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  EXPECT_EQ(field.size(), 4096u);
  EXPECT_LT(seconds, 1.0);
}

}  // namespace
}  // namespace privcnp::grid
