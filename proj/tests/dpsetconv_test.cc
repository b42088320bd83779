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

#include "privcnp/dpsetconv.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "privcnp/accounting.h"
#include "privcnp/errors.h"
#include "privcnp/random.h"

namespace privcnp::dpsetconv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ContextSet RandomContext(Rng& rng, int n, double lo, double hi) {
  ContextSet c;
  for (int i = 0; i < n; ++i) {
    c.xs.push_back(Uniform(rng, lo, hi));
    c.ys.push_back(2.0 * StandardNormal(rng));
  }
  return c;
}

MechanismFlags AllOff() {
  return {.enable_clip = false,
          .enable_density_noise = false,
          .enable_signal_noise = false};
}

TEST(Clip, Examples) {
  EXPECT_EQ(Clip(0.5, 1.0), 0.5);
  EXPECT_EQ(Clip(-3.0, 2.0), -2.0);
  EXPECT_EQ(Clip(7.0, kInf), 7.0);
  EXPECT_THROW(Clip(1.0, 0.0), DomainError);
}

TEST(Clip, BoundedAndIdempotent) {
  Rng rng = MakeRng(11);
  for (int i = 0; i < 1000; ++i) {
    const double y = 10.0 * StandardNormal(rng);
    const double c = Uniform(rng, 0.1, 5.0);
    const double once = Clip(y, c);
    EXPECT_LE(std::abs(once), c * (1 + 1e-15));
    EXPECT_EQ(Clip(once, c), once);
    if (std::abs(y) <= c) {
      EXPECT_EQ(once, y);
    }
  }
}

TEST(SetConvChannels, EmptyContextIsZero) {
  const grid::GridSpec g = grid::GridSpec::Window1d(-2, 2, 8);
  const auto [d, s] = SetConvChannels({}, g, 0.3);
  ASSERT_EQ(d.size(), g.size());
  for (std::size_t j = 0; j < d.size(); ++j) {
    EXPECT_EQ(d[j], 0.0);
    EXPECT_EQ(s[j], 0.0);
  }
}

TEST(SetConvChannels, PointOnNodeHasUnitDensity) {
  const grid::GridSpec g = grid::GridSpec::Parse("-1:0.25:9");
  const ContextSet c{{0.5}, {1.7}};
  const auto [d, s] = SetConvChannels(c, g, 0.2);
  EXPECT_EQ(d[6], 1.0);
  EXPECT_EQ(s[6], 1.7);
}

TEST(SetConvChannels, MatchesDoubleLoop) {
  Rng rng = MakeRng(3);
  const grid::GridSpec g = grid::GridSpec::Window1d(-7, 7, 32);
  const ContextSet c = RandomContext(rng, 3, -2, 2);
  const double ls = 0.17;
  const auto [d, s] = SetConvChannels(c, g, ls);
  for (int j = 0; j < g.axes[0].count; ++j) {
    const double x = -7.0 + j / 32.0;
    double want_d = 0.0;
    double want_s = 0.0;
    for (int n = 0; n < 3; ++n) {
      const double u = (x - c.xs[n]) / ls;
      want_d += std::exp(-u * u / 2);
      want_s += c.ys[n] * std::exp(-u * u / 2);
    }
    EXPECT_NEAR(d[j], want_d, 1e-12);
    EXPECT_NEAR(s[j], want_s, 1e-12);
  }
}

TEST(DpEncode, DisabledMechanismEqualsChannels) {
  Rng data = MakeRng(5);
  const grid::GridSpec g = grid::GridSpec::Window1d(-3, 3, 16);
  const ContextSet c = RandomContext(data, 10, -2, 2);
  Rng rng = MakeRng(6);
  const EncodedRepresentation rep =
      DpEncode(c, g, 0.25, {1.0, 1e-3}, kInf, 0.5, rng, AllOff(),
               EncodeMode::kTraining);
  const auto [d, s] = SetConvChannels(c, g, 0.25);
  EXPECT_EQ(rep.density, d);
  EXPECT_EQ(rep.signal, s);
  EXPECT_EQ(rep.sigma_d, 0.0);
  EXPECT_EQ(rep.sigma_s, 0.0);
}

TEST(DpEncode, FixedSeedIsBitIdentical) {
  Rng data = MakeRng(7);
  const grid::GridSpec g = grid::GridSpec::Window1d(-7, 7, 32);
  const ContextSet c = RandomContext(data, 20, -2, 2);
  Rng a = MakeRng(99);
  Rng b = MakeRng(99);
  const auto ra = DpEncode(c, g, 0.1, {3.0, 1e-3}, 1.0, 0.5, a);
  const auto rb = DpEncode(c, g, 0.1, {3.0, 1e-3}, 1.0, 0.5, b);
  EXPECT_EQ(ra.density, rb.density);
  EXPECT_EQ(ra.signal, rb.signal);
  EXPECT_EQ(ra.sigma_d, rb.sigma_d);
}

TEST(DpEncode, RefusesPartialMechanismAtDeployment) {
  const grid::GridSpec g = grid::GridSpec::Window1d(-1, 1, 4);
  Rng rng = MakeRng(1);
  MechanismFlags no_clip;
  no_clip.enable_clip = false;
  EXPECT_THROW(DpEncode({}, g, 0.3, {1.0, 1e-3}, 1.0, 0.5, rng, no_clip),
               RefusalError);
  EXPECT_NO_THROW(DpEncode({}, g, 0.3, {1.0, 1e-3}, 1.0, 0.5, rng, no_clip,
                           EncodeMode::kTraining));
  EXPECT_THROW(DpEncode({}, g, 0.3, {1.0, 0.0}, 1.0, 0.5, rng), DomainError);
}

TEST(DpEncode, ClipsOutputsBeforeEncoding) {
  const grid::GridSpec g = grid::GridSpec::Parse("0:0.5:3");
  const ContextSet c{{0.5}, {-9.0}};
  Rng rng = MakeRng(2);
  MechanismFlags flags;
  flags.enable_density_noise = false;
  flags.enable_signal_noise = false;
  const auto rep = DpEncode(c, g, 0.2, {1.0, 1e-3}, 1.5, 0.5, rng, flags,
                            EncodeMode::kTraining);
  EXPECT_EQ(rep.signal[1], -1.5);
}

TEST(DpEncode, NoiseVarianceAndCorrelationMonteCarlo) {
  const grid::GridSpec g = grid::GridSpec::Parse("-1:0.25:9");
  const double ls = 0.4;
  const ContextSet c{{-0.3, 0.6}, {0.8, -2.5}};
  const auto [clean_d, clean_s] = SetConvChannels(
      {c.xs, {Clip(c.ys[0], 1.0), Clip(c.ys[1], 1.0)}}, g, ls);
  const int n = 50000;
  const std::size_t m = g.size();
  std::vector<double> sum_d(m, 0.0), sq_d(m, 0.0), sum_s(m, 0.0),
      sq_s(m, 0.0);
  std::vector<double> cross(m, 0.0);  // density node 4 times node j
  double sigma_d = 0.0;
  double sigma_s = 0.0;
  for (int k = 0; k < n; ++k) {
    Rng rng = MakeRng(1234, {static_cast<std::uint64_t>(k)});
    const auto rep = DpEncode(c, g, ls, {2.0, 1e-3}, 1.0, 0.3, rng);
    sigma_d = rep.sigma_d;
    sigma_s = rep.sigma_s;
    for (std::size_t j = 0; j < m; ++j) {
      const double ed = rep.density[j] - clean_d[j];
      const double es = rep.signal[j] - clean_s[j];
      sum_d[j] += ed;
      sq_d[j] += ed * ed;
      sum_s[j] += es;
      sq_s[j] += es * es;
    }
    const double e4 = rep.density[4] - clean_d[4];
    for (std::size_t j = 0; j < m; ++j) {
      cross[j] += e4 * (rep.density[j] - clean_d[j]);
    }
  }
  const accounting::NoiseScales want =
      accounting::SetConvNoiseScales({2.0, 1e-3}, 1.0, 0.3);
  EXPECT_DOUBLE_EQ(sigma_d, want.sigma_d);
  EXPECT_DOUBLE_EQ(sigma_s, want.sigma_s);
  const double var_se = std::sqrt(2.0 / (n - 1));
  for (std::size_t j = 0; j < m; ++j) {
    const double var_d = (sq_d[j] - sum_d[j] * sum_d[j] / n) / (n - 1);
    const double var_s = (sq_s[j] - sum_s[j] * sum_s[j] / n) / (n - 1);
    EXPECT_NEAR(var_d / (sigma_d * sigma_d), 1.0, 3 * var_se) << j;
    EXPECT_NEAR(var_s / (sigma_s * sigma_s), 1.0, 3 * var_se) << j;
    const double dx = 0.25 * (static_cast<double>(j) - 4.0);
    const double rho = std::exp(-dx * dx / (2 * ls * ls));
    const double corr = cross[j] / n / (sigma_d * sigma_d);
    const double corr_se = std::max(1.0 - rho * rho, 1e-3) / std::sqrt(n);
    EXPECT_NEAR(corr, rho, 3 * corr_se + 3 * var_se * rho) << j;
  }
}

TEST(DpEncode, CalibrationIdentity) {
  Rng rng = MakeRng(21);
  const grid::GridSpec g = grid::GridSpec::Window1d(-1, 1, 4);
  for (int i = 0; i < 50; ++i) {
    const accounting::PrivacyBudget budget{Uniform(rng, 0.1, 8.0),
                                           std::exp(Uniform(rng, -12, -2))};
    const double clip = Uniform(rng, 0.1, 4.0);
    const double t = Uniform(rng, 0.05, 0.95);
    const auto rep = DpEncode({}, g, 0.3, budget, clip, t, rng);
    const double mu = std::sqrt(4 * clip * clip / (rep.sigma_s * rep.sigma_s) +
                                2 / (rep.sigma_d * rep.sigma_d));
    EXPECT_NEAR(mu, accounting::MuFromBudget(budget), 1e-9);
    EXPECT_EQ(rep.mu, accounting::MuFromBudget(budget));
  }
}

TEST(DpEncode, TranslationEquivariance) {
  // Dyadic values keep every coordinate and difference exact.
  const ContextSet c{{-0.75, 0.125, 1.5}, {0.5, -1.25, 2.0}};
  ContextSet shifted = c;
  for (double& x : shifted.xs) x += 3.0;
  const grid::GridSpec g = grid::GridSpec::Parse("-2:0.125:33");
  const grid::GridSpec gs = grid::GridSpec::Parse("1:0.125:33");
  Rng a = MakeRng(8);
  Rng b = MakeRng(8);
  const auto ra = DpEncode(c, g, 0.25, {1.0, 1e-3}, 1.0, 0.5, a);
  const auto rb = DpEncode(shifted, gs, 0.25, {1.0, 1e-3}, 1.0, 0.5, b);
  EXPECT_EQ(ra.density, rb.density);
  EXPECT_EQ(ra.signal, rb.signal);
}

TEST(DpEncode, SignalLinearInOutputs) {
  Rng data = MakeRng(9);
  const grid::GridSpec g = grid::GridSpec::Window1d(-3, 3, 16);
  const ContextSet c = RandomContext(data, 12, -2, 2);
  const auto [d0, s0] = SetConvChannels(c, g, 0.3);
  for (double a : {2.0, -0.5, 3.0}) {
    ContextSet scaled = c;
    for (double& y : scaled.ys) y *= a;
    Rng rng = MakeRng(1);
    const auto rep = DpEncode(scaled, g, 0.3, {1.0, 1e-3}, kInf, 0.5, rng,
                              AllOff(), EncodeMode::kTraining);
    for (std::size_t j = 0; j < s0.size(); ++j) {
      if (a == 3.0) {
        EXPECT_NEAR(rep.signal[j], a * s0[j], 1e-12 * (1 + std::abs(s0[j])));
      } else {
        EXPECT_EQ(rep.signal[j], a * s0[j]);
      }
    }
  }
}

TEST(NeighbourDiff, IdenticalContextsGiveZero) {
  const ChannelDiff diff = NeighbourDiff(0.3, 0.7, 0.3, 0.7, 1.0, 0.2);
  EXPECT_NEAR(diff.density, 0.0, 1e-12);
  EXPECT_NEAR(diff.signal, 0.0, 1e-12);
}

TEST(NeighbourDiff, FarApartCrossTermVanishes) {
  const double c = 1.3;
  const double ls = 0.1;
  const ChannelDiff diff = NeighbourDiff(0.0, c, 100 * ls, -c, c, ls);
  EXPECT_NEAR(diff.density, std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(diff.signal, std::sqrt(2.0) * c, 1e-6);
}

TEST(NeighbourDiff, CoincidentOppositeOutputsReachSignalBound) {
  const double c = 1.3;
  const ChannelDiff diff = NeighbourDiff(0.4, 5 * c, 0.4, -c, c, 0.1);
  EXPECT_EQ(diff.density, 0.0);
  EXPECT_NEAR(diff.signal, 2 * c, 1e-12);
}

TEST(NeighbourDiff, MatchesGramOracle) {
  Rng rng = MakeRng(4);
  for (int i = 0; i < 200; ++i) {
    const double ls = Uniform(rng, 0.05, 1.0);
    const double x1 = Uniform(rng, -2, 2);
    const double x2 = Uniform(rng, -2, 2);
    const double a = Uniform(rng, -1, 1);
    const double b = Uniform(rng, -1, 1);
    const double k = std::exp(-(x1 - x2) * (x1 - x2) / (2 * ls * ls));
    const ChannelDiff diff = NeighbourDiff(x1, a, x2, b, 1.0, ls);
    EXPECT_NEAR(diff.density, std::sqrt(2 - 2 * k), 1e-7);
    EXPECT_NEAR(diff.signal * diff.signal, a * a - 2 * a * b * k + b * b,
                1e-12);
  }
}

TEST(SensitivityProbe, RandomTrialsRespectBounds) {
  Rng rng = MakeRng(13);
  for (double c : {0.5, 1.0, 3.0}) {
    const ChannelDiff diff = SensitivityProbe(10000, rng, c, 0.2);
    EXPECT_LE(diff.density, std::sqrt(2.0) + 1e-9);
    EXPECT_LE(diff.signal, 2 * c + 1e-9);
  }
}

TEST(AdversarialProbe, ExceedsNinetyNinePercentOfBounds) {
  Rng rng = MakeRng(17);
  const ChannelDiff diff = AdversarialProbe(100, rng, 2.0, 0.3);
  EXPECT_GT(diff.density, 0.99 * std::sqrt(2.0));
  EXPECT_GT(diff.signal, 0.99 * 4.0);
  EXPECT_LE(diff.density, std::sqrt(2.0) + 1e-9);
  EXPECT_LE(diff.signal, 4.0 + 1e-9);
}

}  // namespace
}  // namespace privcnp::dpsetconv
