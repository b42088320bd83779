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

// Differentially private SetConv encoder.
//
// A context set is mapped to a density channel sum_n psi((x - x_n)/lambda)
// and a signal channel sum_n clip(y_n, C) psi((x - x_n)/lambda) on a 1-D
// grid. Each channel then receives an independent GP sample with the same
// unit-amplitude RBF kernel, scaled so that the pair of releases is mu-GDP
// for the mu implied by the (epsilon, delta) budget.

#ifndef PRIVCNP_DPSETCONV_H_
#define PRIVCNP_DPSETCONV_H_

#include <cmath>
#include <utility>
#include <vector>

#include "privcnp/accounting.h"
#include "privcnp/grid_sampler.h"
#include "privcnp/random.h"

namespace privcnp::dpsetconv {

struct ContextSet {
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t size() const { return xs.size(); }
  void Validate() const;
};

struct EncodedRepresentation {
  grid::GridSpec grid;
  std::vector<double> density;
  std::vector<double> signal;
  // Noise multipliers actually applied; 0 for a channel whose noise was
  // disabled.
  double sigma_d = 0.0;
  double sigma_s = 0.0;
  double lengthscale = 0.0;
  double clip = 0.0;
  double t = 0.0;
  double mu = 0.0;
};

// Ablation switches. Anything other than the default is refused in
// kDeploy mode.
struct MechanismFlags {
  bool enable_clip = true;
  bool enable_density_noise = true;
  bool enable_signal_noise = true;

  bool AllEnabled() const {
    return enable_clip && enable_density_noise && enable_signal_noise;
  }
};

enum class EncodeMode { kDeploy, kTraining };

// Unit-scale GP noise fields for the two channels.
struct UnitNoise {
  std::vector<double> density;
  std::vector<double> signal;
};

// y * min(1, C / |y|). C may be +infinity.
double Clip(double y, double clip);

std::pair<std::vector<double>, std::vector<double>> SetConvChannels(
    const ContextSet& context, const grid::GridSpec& grid, double lengthscale);

// Per-axis factors of the noise kernel exp(-(x - x')^2 / (2 lambda^2)).
grid::GridFactors NoiseFactors(const grid::GridSpec& grid, double lengthscale);

// Density field first, then signal field, from the same stream.
UnitNoise DrawUnitNoise(const grid::GridFactors& factors, Rng& rng);

EncodedRepresentation DpEncode(const ContextSet& context,
                               const grid::GridSpec& grid, double lengthscale,
                               const accounting::PrivacyBudget& budget,
                               double clip, double t, Rng& rng,
                               MechanismFlags flags = {},
                               EncodeMode mode = EncodeMode::kDeploy);

// As DpEncode with mu already computed and noise fields supplied.
EncodedRepresentation DpEncodeWithNoise(const ContextSet& context,
                                        const grid::GridSpec& grid,
                                        double lengthscale, double mu,
                                        double clip, double t,
                                        const UnitNoise& noise,
                                        MechanismFlags flags = {},
                                        EncodeMode mode = EncodeMode::kDeploy);

// RKHS norms of channel differences between two neighbouring contexts that
// differ in one point, (x1, y1) replaced by (x2, y2):
//   density  ||k_x1 - k_x2||
//   signal   ||phi(y1) k_x1 - phi(y2) k_x2||
// with ||a k_x1 - b k_x2||^2 = a^2 - 2 a b k(x1, x2) + b^2.
struct ChannelDiff {
  double density = 0.0;
  double signal = 0.0;
};
ChannelDiff NeighbourDiff(double x1, double y1, double x2, double y2,
                          double clip, double lengthscale);

// Random search over neighbouring pairs with inputs in [-window, window] and
// outputs in [-3C, 3C] (clipped before use). Returns the largest norms seen.
ChannelDiff SensitivityProbe(int trials, Rng& rng, double clip,
                             double lengthscale, double window = 7.0);

// Outputs pinned to +C and -C. The density difference is probed with inputs
// 100 lengthscales apart, the signal difference with nearly coincident inputs,
// where a separated pair only reaches sqrt(2) C.
ChannelDiff AdversarialProbe(int trials, Rng& rng, double clip,
                             double lengthscale);

// exp(-u^2 / 2); psi(0) = 1 so the implied kernel bound is 1.
inline double Psi(double u) { return std::exp(-0.5 * u * u); }

}  // namespace privcnp::dpsetconv

#endif  // PRIVCNP_DPSETCONV_H_
