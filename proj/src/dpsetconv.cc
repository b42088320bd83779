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

#include <algorithm>
#include <cmath>
#include <limits>

#include "privcnp/errors.h"

namespace privcnp::dpsetconv {
namespace {

void CheckOneAxis(const grid::GridSpec& grid) {
  grid.Validate();
  if (grid.dims() != 1) {
    throw DomainError("the SetConv encoder works on 1-D grids");
  }
}

}  // namespace

void ContextSet::Validate() const {
  if (xs.size() != ys.size()) {
    throw DomainError("context inputs and outputs differ in length");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw DomainError("context values must be finite");
    }
  }
}

double Clip(double y, double clip) {
  if (!(clip > 0.0)) throw DomainError("clip threshold must be positive");
  if (std::abs(y) <= clip) return y;
  return std::copysign(clip, y);
}

std::pair<std::vector<double>, std::vector<double>> SetConvChannels(
    const ContextSet& context, const grid::GridSpec& grid,
    double lengthscale) {
  context.Validate();
  CheckOneAxis(grid);
  if (!(lengthscale > 0.0)) throw DomainError("lengthscale must be positive");
  const grid::GridAxis& axis = grid.axes[0];
  std::vector<double> density(static_cast<std::size_t>(axis.count), 0.0);
  std::vector<double> signal(density.size(), 0.0);
  for (int j = 0; j < axis.count; ++j) {
    const double x = axis.Coordinate(j);
    double d = 0.0;
    double s = 0.0;
    for (std::size_t n = 0; n < context.size(); ++n) {
      const double w = Psi((x - context.xs[n]) / lengthscale);
      d += w;
      s += context.ys[n] * w;
    }
    density[j] = d;
    signal[j] = s;
  }
  return {std::move(density), std::move(signal)};
}

grid::GridFactors NoiseFactors(const grid::GridSpec& grid,
                               double lengthscale) {
  CheckOneAxis(grid);
  const grid::Kernel1d kernel = grid::RbfKernel(lengthscale);
  return grid::PerDimFactors(grid, std::span<const grid::Kernel1d>(&kernel, 1));
}

UnitNoise DrawUnitNoise(const grid::GridFactors& factors, Rng& rng) {
  UnitNoise noise;
  noise.density = grid::KroneckerSample(factors, rng);
  noise.signal = grid::KroneckerSample(factors, rng);
  return noise;
}

EncodedRepresentation DpEncodeWithNoise(const ContextSet& context,
                                        const grid::GridSpec& grid,
                                        double lengthscale, double mu,
                                        double clip, double t,
                                        const UnitNoise& noise,
                                        MechanismFlags flags,
                                        EncodeMode mode) {
  if (mode == EncodeMode::kDeploy && !flags.AllEnabled()) {
    throw RefusalError(
        "the privacy mechanism cannot be partially disabled at deployment");
  }
  if (!(clip > 0.0)) throw DomainError("clip threshold must be positive");
  if (flags.enable_signal_noise && !std::isfinite(clip)) {
    throw DomainError("signal noise needs a finite clip threshold");
  }

  EncodedRepresentation rep;
  rep.grid = grid;
  rep.lengthscale = lengthscale;
  rep.clip = clip;
  rep.t = t;
  rep.mu = mu;

  ContextSet clipped = context;
  if (flags.enable_clip) {
    for (double& y : clipped.ys) y = Clip(y, clip);
  }
  auto [density, signal] = SetConvChannels(clipped, grid, lengthscale);

  if (flags.enable_density_noise || flags.enable_signal_noise) {
    // With signal noise off the clip may be infinite; any finite value gives
    // the same sigma_d.
    const double c = std::isfinite(clip) ? clip : 1.0;
    const accounting::NoiseScales scales =
        accounting::SetConvNoiseScalesForMu(mu, c, t);
    if (flags.enable_density_noise) rep.sigma_d = scales.sigma_d;
    if (flags.enable_signal_noise) rep.sigma_s = scales.sigma_s;
  }
  if (rep.sigma_d > 0.0 || rep.sigma_s > 0.0) {
    if (noise.density.size() != density.size() ||
        noise.signal.size() != signal.size()) {
      throw DomainError("noise fields do not match the grid");
    }
  }
  if (rep.sigma_d > 0.0) {
    for (std::size_t j = 0; j < density.size(); ++j) {
      density[j] += rep.sigma_d * noise.density[j];
    }
  }
  if (rep.sigma_s > 0.0) {
    for (std::size_t j = 0; j < signal.size(); ++j) {
      signal[j] += rep.sigma_s * noise.signal[j];
    }
  }
  rep.density = std::move(density);
  rep.signal = std::move(signal);
  return rep;
}

EncodedRepresentation DpEncode(const ContextSet& context,
                               const grid::GridSpec& grid, double lengthscale,
                               const accounting::PrivacyBudget& budget,
                               double clip, double t, Rng& rng,
                               MechanismFlags flags, EncodeMode mode) {
  if (mode == EncodeMode::kDeploy && !flags.AllEnabled()) {
    throw RefusalError(
        "the privacy mechanism cannot be partially disabled at deployment");
  }
  const double mu = accounting::MuFromBudget(budget);
  UnitNoise noise;
  if (flags.enable_density_noise || flags.enable_signal_noise) {
    noise = DrawUnitNoise(NoiseFactors(grid, lengthscale), rng);
  }
  return DpEncodeWithNoise(context, grid, lengthscale, mu, clip, t, noise,
                           flags, mode);
}

ChannelDiff NeighbourDiff(double x1, double y1, double x2, double y2,
                          double clip, double lengthscale) {
  const double u = (x1 - x2) / lengthscale;
  // 1 - k(x1, x2), accurate for nearby inputs.
  const double one_minus_k = -std::expm1(-0.5 * u * u);
  const double a = Clip(y1, clip);
  const double b = Clip(y2, clip);
  ChannelDiff diff;
  diff.density = std::sqrt(2.0 * one_minus_k);
  diff.signal =
      std::sqrt(std::max(0.0, (a - b) * (a - b) + 2.0 * a * b * one_minus_k));
  return diff;
}

ChannelDiff SensitivityProbe(int trials, Rng& rng, double clip,
                             double lengthscale, double window) {
  ChannelDiff worst;
  for (int i = 0; i < trials; ++i) {
    const double x1 = Uniform(rng, -window, window);
    const double x2 = Uniform(rng, -window, window);
    const double y1 = Uniform(rng, -3.0 * clip, 3.0 * clip);
    const double y2 = Uniform(rng, -3.0 * clip, 3.0 * clip);
    const ChannelDiff d = NeighbourDiff(x1, y1, x2, y2, clip, lengthscale);
    worst.density = std::max(worst.density, d.density);
    worst.signal = std::max(worst.signal, d.signal);
  }
  return worst;
}

ChannelDiff AdversarialProbe(int trials, Rng& rng, double clip,
                             double lengthscale) {
  ChannelDiff best;
  for (int i = 0; i < trials; ++i) {
    const double x1 = Uniform(rng, -7.0, 7.0);
    // Outputs beyond C are clipped to exactly +-C.
    const double y1 = clip * Uniform(rng, 1.0, 3.0);
    const double y2 = -clip * Uniform(rng, 1.0, 3.0);
    const double far = x1 + 100.0 * lengthscale;
    const double near = x1 + 1e-3 * lengthscale * Uniform(rng, -1.0, 1.0);
    best.density = std::max(
        best.density, NeighbourDiff(x1, y1, far, y2, clip, lengthscale).density);
    best.signal = std::max(
        best.signal, NeighbourDiff(x1, y1, near, y2, clip, lengthscale).signal);
  }
  return best;
}

}  // namespace privcnp::dpsetconv
