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

// The DPConvCNP: a convolutional conditional neural process whose SetConv
// encoder releases its density and signal channels through the functional
// Gaussian mechanism.
//
//   mu = mu(eps, delta)
//   (t, C) = (sig(NN_t(mu, N/512)), exp(NN_C(mu, N/512)))
//   channels = DP SetConv(context; lambda, C, t)            [2, G]
//   input = a [density, signal, sigma_d, sigma_s]            [4, G]
//   (a = ModelConfig::InputScale())
//   h = UNet(input)                                          [2, G]
//   (mean, log_std)(x*) = sum_j h_j psi((x* - g_j) / lambda)
//
// Everything except the unit GP noise fields is differentiable, including the
// encoder lengthscale and the noise magnitudes through t and C. The noise
// fields are reparameterised samples drawn with the current lengthscale but
// treated as constants on the backward pass.

#ifndef PRIVCNP_MODEL_H_
#define PRIVCNP_MODEL_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>

#include "json.hpp"
#include "privcnp/accounting.h"
#include "privcnp/dpsetconv.h"
#include "privcnp/grid_sampler.h"
#include "privcnp/kernel_gp.h"
#include "privcnp/nn/params.h"
#include "privcnp/nn/tape.h"
#include "privcnp/random.h"
#include "privcnp/taskgen.h"

namespace privcnp::model {

struct ModelConfig {
  double window_lo = -7.0;
  double window_hi = 7.0;
  int points_per_unit = 32;
  int depth = 7;          // stride-2 layers in the UNet
  int width = 256;        // channels of every UNet layer below the first
  int in_channels = 32;   // channels after the initial convolution
  int kernel_size = 5;
  double initial_lengthscale = 0.20;
  bool share_decoder_lengthscale = true;
  // Fixed multiplier on the four UNet input channels. 0 selects
  // 1 / (points_per_unit * initial_lengthscale * sqrt(2 pi)), the inverse of
  // the grid mass of one context point at the initial lengthscale.
  double input_scale = 0.0;
  int tc_hidden = 32;
  int tc_depth = 2;
  // N is divided by this before entering the t and C networks.
  double context_size_scale = 512.0;
  // Initial output bias of NN_C, so C starts at exp(clip_bias_init).
  double clip_bias_init = 0.0;
  // When set, t and C are these constants instead of network outputs.
  std::optional<double> fixed_t;
  std::optional<double> fixed_clip;

  // Desk-scale preset: depth 4, width 32, 16 points per unit.
  static ModelConfig Tiny();
  // Full-size preset: depth 7, width 256, 32 points per unit.
  static ModelConfig Full();

  void Validate() const;
  grid::GridSpec Grid() const;
  double InputScale() const;

  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json& j);
};

struct ForwardOptions {
  dpsetconv::MechanismFlags flags;
  dpsetconv::EncodeMode mode = dpsetconv::EncodeMode::kDeploy;
  // Pre-drawn unit noise fields. When null, fresh fields are drawn from the
  // rng passed to the forward call.
  const dpsetconv::UnitNoise* noise = nullptr;
};

// Values of one forward pass recorded on a tape.
struct TapeOutputs {
  nn::Var mean;      // [1, M]
  nn::Var log_std;   // [1, M]
  nn::Var density;   // [1, G] encoder output after noise
  nn::Var signal;    // [1, G]
  double mu = 0.0;
  double t = 0.0;
  double clip = 0.0;
  double sigma_d = 0.0;  // applied
  double sigma_s = 0.0;  // applied
};

class DpConvCnp {
 public:
  // Freshly initialised parameters.
  DpConvCnp(ModelConfig config, std::uint64_t init_seed);
  // Parameters restored from a checkpoint; names and shapes are checked.
  DpConvCnp(ModelConfig config, nn::ParamStore params);

  const ModelConfig& config() const { return config_; }
  const grid::GridSpec& grid() const { return grid_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  double lengthscale() const;
  double decoder_lengthscale() const;

  // (t, C) for a given mu and context size.
  std::pair<double, double> TcMaps(double mu, std::size_t context_size) const;
  // Same, recorded on a tape.
  std::pair<nn::Var, nn::Var> TcMaps(nn::Binding& bind, double mu,
                                     std::size_t context_size) const;

  TapeOutputs Forward(nn::Binding& bind,
                      const dpsetconv::ContextSet& context,
                      std::span<const double> target_xs,
                      const accounting::PrivacyBudget& budget, Rng& rng,
                      const ForwardOptions& options = {}) const;

  gp::GaussianPrediction Predict(const dpsetconv::ContextSet& context,
                                 std::span<const double> target_xs,
                                 const accounting::PrivacyBudget& budget,
                                 Rng& rng,
                                 const ForwardOptions& options = {}) const;

  // Mean target NLL of one task. With grads non-null, also backpropagates and
  // adds d(loss)/d(params) into grads.
  double TaskLoss(const taskgen::Task& task, Rng& rng,
                  const ForwardOptions& options,
                  nn::Gradients* grads) const;

  // Cholesky factors of the noise kernel at the given lengthscale. The last
  // factor is cached; safe to call from several threads.
  std::shared_ptr<const grid::GridFactors> NoiseFactors(
      double lengthscale) const;

 private:
  void InitParams(std::uint64_t seed);
  nn::Var Unet(nn::Binding& bind, nn::Var input) const;

  ModelConfig config_;
  grid::GridSpec grid_;
  nn::ParamStore params_;

  mutable std::mutex cache_mu_;
  mutable double cached_lengthscale_ = -1.0;
  mutable std::shared_ptr<const grid::GridFactors> cached_factors_;
};

// Deployment: one forward pass with the full mechanism and fresh noise.
gp::GaussianPrediction MetaTest(const DpConvCnp& model,
                                const dpsetconv::ContextSet& context,
                                const accounting::PrivacyBudget& budget,
                                std::span<const double> target_xs, Rng& rng);

// Mean of per-point Gaussian NLL over targets, recorded on the tape.
nn::Var GaussianNllLoss(nn::Var mean, nn::Var log_std,
                        std::span<const double> ys);

// sum_n w_n psi((g_j - x_n) / lambda) for every grid point g_j, returned as
// [2, G]: row 0 with all weights 1 (density), row 1 with the given weights
// (signal). Differentiable in weights and lambda.
nn::Var SetConvEncode(std::span<const double> xs, nn::Var weights,
                      nn::Var lengthscale, const grid::GridAxis& axis);

// out[c][m] = sum_j h[c][j] psi((x_m - g_j) / lambda) for h [C, G].
// Differentiable in h and lambda.
nn::Var RbfSmooth(nn::Var h, nn::Var lengthscale, const grid::GridAxis& axis,
                  std::span<const double> target_xs);

// y * min(1, C / |y|) elementwise with a differentiable scalar C.
nn::Var ClipOutputs(std::span<const double> ys, nn::Var clip);

}  // namespace privcnp::model

#endif  // PRIVCNP_MODEL_H_
