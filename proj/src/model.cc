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

#include "privcnp/model.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "privcnp/errors.h"
#include "privcnp/nn/ops.h"

namespace privcnp::model {
namespace {

using nlohmann::json;
using nn::Tensor;
using nn::Var;

std::string Layer(const std::string& block, int i) {
  return block + std::to_string(i);
}

Tensor UniformTensor(std::vector<std::size_t> shape, double bound, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values) v = Uniform(rng, -bound, bound);
  return t;
}

}  // namespace

ModelConfig ModelConfig::Tiny() {
  ModelConfig c;
  c.depth = 4;
  c.width = 32;
  c.in_channels = 32;
  c.points_per_unit = 16;
  return c;
}

ModelConfig ModelConfig::Full() { return ModelConfig{}; }

void ModelConfig::Validate() const {
  if (!(window_hi > window_lo)) throw DomainError("empty model window");
  if (points_per_unit < 1 || depth < 0 || width < 1 || in_channels < 1 ||
      tc_hidden < 1 || tc_depth < 1) {
    throw DomainError("model sizes must be positive");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw DomainError("kernel size must be odd");
  }
  if (!(initial_lengthscale > 0.0)) {
    throw DomainError("initial lengthscale must be positive");
  }
  if (!(input_scale >= 0.0)) throw DomainError("input scale must be >= 0");
  if (!(context_size_scale > 0.0)) {
    throw DomainError("context size scale must be positive");
  }
  if (fixed_t && !(*fixed_t > 0.0 && *fixed_t < 1.0)) {
    throw DomainError("fixed t must lie in (0, 1)");
  }
  if (fixed_clip && !(*fixed_clip > 0.0)) {
    throw DomainError("fixed clip must be positive");
  }
}

double ModelConfig::InputScale() const {
  if (input_scale > 0.0) return input_scale;
  return 1.0 / (points_per_unit * initial_lengthscale *
                std::sqrt(2.0 * std::numbers::pi));
}

grid::GridSpec ModelConfig::Grid() const {
  return grid::GridSpec::Window1d(window_lo, window_hi, points_per_unit);
}

json ModelConfig::ToJson() const {
  json j = {{"window_lo", window_lo},
            {"window_hi", window_hi},
            {"points_per_unit", points_per_unit},
            {"depth", depth},
            {"width", width},
            {"in_channels", in_channels},
            {"kernel_size", kernel_size},
            {"initial_lengthscale", initial_lengthscale},
            {"share_decoder_lengthscale", share_decoder_lengthscale},
            {"tc_hidden", tc_hidden},
            {"tc_depth", tc_depth},
            {"input_scale", input_scale},
            {"context_size_scale", context_size_scale},
            {"clip_bias_init", clip_bias_init}};
  if (fixed_t) j["fixed_t"] = *fixed_t;
  if (fixed_clip) {
    j["fixed_clip"] = std::isfinite(*fixed_clip) ? json(*fixed_clip)
                                                 : json("inf");
  }
  return j;
}

ModelConfig ModelConfig::FromJson(const json& j) {
  ModelConfig c;
  c.window_lo = j.value("window_lo", c.window_lo);
  c.window_hi = j.value("window_hi", c.window_hi);
  c.points_per_unit = j.value("points_per_unit", c.points_per_unit);
  c.depth = j.value("depth", c.depth);
  c.width = j.value("width", c.width);
  c.in_channels = j.value("in_channels", c.in_channels);
  c.kernel_size = j.value("kernel_size", c.kernel_size);
  c.initial_lengthscale = j.value("initial_lengthscale", c.initial_lengthscale);
  c.share_decoder_lengthscale =
      j.value("share_decoder_lengthscale", c.share_decoder_lengthscale);
  c.tc_hidden = j.value("tc_hidden", c.tc_hidden);
  c.tc_depth = j.value("tc_depth", c.tc_depth);
  c.input_scale = j.value("input_scale", c.input_scale);
  c.context_size_scale = j.value("context_size_scale", c.context_size_scale);
  c.clip_bias_init = j.value("clip_bias_init", c.clip_bias_init);
  if (j.contains("fixed_t")) c.fixed_t = j.at("fixed_t").get<double>();
  if (j.contains("fixed_clip")) {
    const json& v = j.at("fixed_clip");
    c.fixed_clip = v.is_string() && v.get<std::string>() == "inf"
                       ? std::numeric_limits<double>::infinity()
                       : v.get<double>();
  }
  c.Validate();
  return c;
}

// ---------------------------------------------------------------------------
// Differentiable encoder and decoder pieces.

Var ClipOutputs(std::span<const double> ys, Var clip) {
  const double c = clip.scalar();
  if (!(c > 0.0)) throw DomainError("clip threshold must be positive");
  Tensor out({ys.size()});
  std::vector<double> dclip(ys.size(), 0.0);
  for (std::size_t n = 0; n < ys.size(); ++n) {
    const double y = ys[n];
    if (std::abs(y) > c) {
      out[n] = y > 0.0 ? c : -c;
      dclip[n] = y > 0.0 ? 1.0 : -1.0;
    } else {
      out[n] = y;
    }
  }
  const std::size_t ic = clip.id;
  return clip.tape->Push(std::move(out), {ic},
                         [ic, dclip = std::move(dclip)](nn::Tape& t,
                                                        std::size_t self) {
                           const Tensor& g = t.grad(self);
                           double acc = 0.0;
                           for (std::size_t n = 0; n < g.size(); ++n) {
                             acc += g[n] * dclip[n];
                           }
                           t.grad(ic)[0] += acc;
                         });
}

Var SetConvEncode(std::span<const double> xs, Var weights, Var lengthscale,
                  const grid::GridAxis& axis) {
  const Tensor& w = weights.value();
  if (w.size() != xs.size()) {
    throw DomainError("SetConvEncode: weights and inputs differ in length");
  }
  const double lam = lengthscale.scalar();
  if (!(lam > 0.0)) throw DomainError("lengthscale must be positive");
  const auto g_len = static_cast<std::size_t>(axis.count);
  const std::size_t n_ctx = xs.size();
  Tensor out({2, g_len}, 0.0);
  for (std::size_t j = 0; j < g_len; ++j) {
    const double x = axis.Coordinate(static_cast<int>(j));
    double d = 0.0;
    double s = 0.0;
    for (std::size_t n = 0; n < n_ctx; ++n) {
      const double psi = dpsetconv::Psi((x - xs[n]) / lam);
      d += psi;
      s += w[n] * psi;
    }
    out[j] = d;
    out[g_len + j] = s;
  }
  const std::vector<double> inputs(xs.begin(), xs.end());
  const std::size_t iw = weights.id;
  const std::size_t il = lengthscale.id;
  return weights.tape->Push(
      std::move(out), {iw, il},
      [inputs, axis, g_len, iw, il](nn::Tape& t, std::size_t self) {
        const Tensor& g = t.grad(self);
        const Tensor& w = t.value(iw);
        const double lam = t.value(il)[0];
        const bool want_w = t.needs_grad(iw);
        const bool want_l = t.needs_grad(il);
        double* gw = want_w ? t.grad(iw).data() : nullptr;
        double glam = 0.0;
        for (std::size_t j = 0; j < g_len; ++j) {
          const double x = axis.Coordinate(static_cast<int>(j));
          const double gd = g[j];
          const double gs = g[g_len + j];
          for (std::size_t n = 0; n < inputs.size(); ++n) {
            const double u = (x - inputs[n]) / lam;
            const double psi = dpsetconv::Psi(u);
            if (want_w) gw[n] += gs * psi;
            if (want_l) glam += (gd + gs * w[n]) * psi * u * u / lam;
          }
        }
        if (want_l) t.grad(il)[0] += glam;
      });
}

Var RbfSmooth(Var h, Var lengthscale, const grid::GridAxis& axis,
              std::span<const double> target_xs) {
  const Tensor& hv = h.value();
  if (hv.rank() != 2 || hv.shape[1] != static_cast<std::size_t>(axis.count)) {
    throw DomainError("RbfSmooth: input does not match the grid");
  }
  const double lam = lengthscale.scalar();
  if (!(lam > 0.0)) throw DomainError("lengthscale must be positive");
  const std::size_t channels = hv.shape[0];
  const std::size_t g_len = hv.shape[1];
  const std::size_t m_len = target_xs.size();
  Tensor out({channels, m_len}, 0.0);
  for (std::size_t m = 0; m < m_len; ++m) {
    for (std::size_t j = 0; j < g_len; ++j) {
      const double psi = dpsetconv::Psi(
          (target_xs[m] - axis.Coordinate(static_cast<int>(j))) / lam);
      for (std::size_t c = 0; c < channels; ++c) {
        out[c * m_len + m] += hv[c * g_len + j] * psi;
      }
    }
  }
  const std::vector<double> targets(target_xs.begin(), target_xs.end());
  const std::size_t ih = h.id;
  const std::size_t il = lengthscale.id;
  return h.tape->Push(
      std::move(out), {ih, il},
      [targets, axis, channels, g_len, ih, il](nn::Tape& t, std::size_t self) {
        const Tensor& g = t.grad(self);
        const Tensor& hv = t.value(ih);
        const double lam = t.value(il)[0];
        const std::size_t m_len = targets.size();
        const bool want_h = t.needs_grad(ih);
        const bool want_l = t.needs_grad(il);
        double* gh = want_h ? t.grad(ih).data() : nullptr;
        double glam = 0.0;
        for (std::size_t m = 0; m < m_len; ++m) {
          for (std::size_t j = 0; j < g_len; ++j) {
            const double u =
                (targets[m] - axis.Coordinate(static_cast<int>(j))) / lam;
            const double psi = dpsetconv::Psi(u);
            double acc = 0.0;
            for (std::size_t c = 0; c < channels; ++c) {
              const double gcm = g[c * m_len + m];
              if (want_h) gh[c * g_len + j] += gcm * psi;
              acc += gcm * hv[c * g_len + j];
            }
            if (want_l) glam += acc * psi * u * u / lam;
          }
        }
        if (want_l) t.grad(il)[0] += glam;
      });
}

Var GaussianNllLoss(Var mean, Var log_std, std::span<const double> ys) {
  const Tensor& mu = mean.value();
  const Tensor& ls = log_std.value();
  if (mu.size() != ys.size() || ls.size() != ys.size()) {
    throw DomainError("prediction and targets differ in length");
  }
  if (ys.empty()) throw DomainError("loss over an empty target set");
  const double inv_m = 1.0 / static_cast<double>(ys.size());
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double total = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double r = ys[i] - mu[i];
    total += half_log_2pi + ls[i] + 0.5 * r * r * std::exp(-2.0 * ls[i]);
  }
  const std::vector<double> targets(ys.begin(), ys.end());
  const std::size_t im = mean.id;
  const std::size_t is = log_std.id;
  return mean.tape->Push(
      Tensor::Scalar(total * inv_m), {im, is},
      [targets, im, is, inv_m](nn::Tape& t, std::size_t self) {
        const double g = t.grad(self)[0] * inv_m;
        const Tensor& mu = t.value(im);
        const Tensor& ls = t.value(is);
        const bool want_m = t.needs_grad(im);
        const bool want_s = t.needs_grad(is);
        double* gm = want_m ? t.grad(im).data() : nullptr;
        double* gs = want_s ? t.grad(is).data() : nullptr;
        for (std::size_t i = 0; i < targets.size(); ++i) {
          const double r = targets[i] - mu[i];
          const double prec = std::exp(-2.0 * ls[i]);
          if (want_m) gm[i] += -g * r * prec;
          if (want_s) gs[i] += g * (1.0 - r * r * prec);
        }
      });
}

// ---------------------------------------------------------------------------
// DpConvCnp

DpConvCnp::DpConvCnp(ModelConfig config, std::uint64_t init_seed)
    : config_(std::move(config)) {
  config_.Validate();
  grid_ = config_.Grid();
  InitParams(init_seed);
}

DpConvCnp::DpConvCnp(ModelConfig config, nn::ParamStore params)
    : config_(std::move(config)) {
  config_.Validate();
  grid_ = config_.Grid();
  InitParams(0);
  if (params.size() != params_.size()) {
    throw DataError("checkpoint has " + std::to_string(params.size()) +
                    " parameters, model expects " +
                    std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto j = params.Find(params_.name(i));
    if (!j || !params.value(*j).SameShape(params_.value(i))) {
      throw DataError("checkpoint parameter mismatch for " + params_.name(i));
    }
    params_.value(i) = params.value(*j);
  }
}

void DpConvCnp::InitParams(std::uint64_t seed) {
  Rng rng = MakeRng(seed, {0x696e6974});
  const auto k = static_cast<std::size_t>(config_.kernel_size);
  params_.Add("encoder/log_lambda",
              Tensor::Scalar(std::log(config_.initial_lengthscale)));
  if (!config_.share_decoder_lengthscale) {
    params_.Add("decoder/log_lambda",
                Tensor::Scalar(std::log(config_.initial_lengthscale)));
  }
  for (const std::string net : {"tnet", "cnet"}) {
    std::size_t in = 2;
    const auto hidden = static_cast<std::size_t>(config_.tc_hidden);
    for (int l = 0; l < config_.tc_depth; ++l) {
      params_.Add(net + "/dense" + std::to_string(l) + "/w",
                  UniformTensor({hidden, in}, std::sqrt(6.0 / in), rng));
      params_.Add(net + "/dense" + std::to_string(l) + "/b",
                  Tensor({hidden}, 0.0));
      in = hidden;
    }
    params_.Add(net + "/out/w", Tensor({1, in}, 0.0));
    params_.Add(net + "/out/b",
                Tensor::Scalar(net == "cnet" ? config_.clip_bias_init : 0.0));
  }

  // Conv weights [out, in, K]; transposed conv weights [in, out, K].
  const auto c0 = static_cast<std::size_t>(config_.in_channels);
  const auto width = static_cast<std::size_t>(config_.width);
  auto conv = [&](const std::string& name, std::size_t out, std::size_t in) {
    params_.Add(name + "/w",
                UniformTensor({out, in, k}, std::sqrt(6.0 / (in * k)), rng));
    params_.Add(name + "/b", Tensor({out}, 0.0));
  };
  auto conv_t = [&](const std::string& name, std::size_t in, std::size_t out,
                    double fan_in) {
    params_.Add(name + "/w",
                UniformTensor({in, out, k}, std::sqrt(6.0 / fan_in), rng));
    params_.Add(name + "/b", Tensor({out}, 0.0));
  };
  conv("unet/init", c0, 4);
  for (int i = 1; i <= config_.depth; ++i) {
    conv(Layer("unet/down", i), width, i == 1 ? c0 : width);
  }
  for (int i = config_.depth; i >= 1; --i) {
    const std::size_t in = i == config_.depth ? width : 2 * width;
    const std::size_t out = i == 1 ? c0 : width;
    // Each output of a stride-2 transposed conv sees about K/2 taps per
    // input channel.
    conv_t(Layer("unet/up", i), in, out, static_cast<double>(in * k) / 2.0);
  }
  // The output layer starts at zero: mean 0 and log-std 0 everywhere.
  const std::size_t final_in = config_.depth > 0 ? 2 * c0 : c0;
  params_.Add("unet/final/w", Tensor({final_in, 2, k}, 0.0));
  params_.Add("unet/final/b", Tensor({2}, 0.0));
}

double DpConvCnp::lengthscale() const {
  return std::exp(params_.value(params_.Index("encoder/log_lambda"))[0]);
}

double DpConvCnp::decoder_lengthscale() const {
  if (config_.share_decoder_lengthscale) return lengthscale();
  return std::exp(params_.value(params_.Index("decoder/log_lambda"))[0]);
}

std::pair<Var, Var> DpConvCnp::TcMaps(nn::Binding& bind, double mu,
                                      std::size_t context_size) const {
  nn::Tape& tape = bind.tape();
  const Var features = tape.Constant(Tensor::Vector(
      {mu, static_cast<double>(context_size) / config_.context_size_scale}));
  auto net = [&](const std::string& name) {
    Var h = features;
    for (int l = 0; l < config_.tc_depth; ++l) {
      const std::string p = name + "/dense" + std::to_string(l);
      h = nn::Relu(nn::Dense(h, bind.Get(p + "/w"), bind.Get(p + "/b")));
    }
    return nn::Dense(h, bind.Get(name + "/out/w"), bind.Get(name + "/out/b"));
  };
  const Var t = config_.fixed_t ? tape.Constant(Tensor::Scalar(*config_.fixed_t))
                                : nn::Sigmoid(net("tnet"));
  const Var c = config_.fixed_clip
                    ? tape.Constant(Tensor::Scalar(*config_.fixed_clip))
                    : nn::Exp(net("cnet"));
  return {t, c};
}

std::pair<double, double> DpConvCnp::TcMaps(double mu,
                                            std::size_t context_size) const {
  nn::Tape tape;
  nn::Binding bind(tape, params_, nullptr);
  const auto [t, c] = TcMaps(bind, mu, context_size);
  return {t.scalar(), c.scalar()};
}

std::shared_ptr<const grid::GridFactors> DpConvCnp::NoiseFactors(
    double lengthscale) const {
  std::lock_guard<std::mutex> lock(cache_mu_);
  if (cached_factors_ == nullptr || cached_lengthscale_ != lengthscale) {
    cached_factors_ = std::make_shared<const grid::GridFactors>(
        dpsetconv::NoiseFactors(grid_, lengthscale));
    cached_lengthscale_ = lengthscale;
  }
  return cached_factors_;
}

Var DpConvCnp::Unet(nn::Binding& bind, Var input) const {
  auto conv = [&](const std::string& name, Var x, int stride) {
    return nn::Conv1d(x, bind.Get(name + "/w"), bind.Get(name + "/b"), stride);
  };
  Var h = nn::Relu(conv("unet/init", input, 1));
  std::vector<Var> skips;
  for (int i = 1; i <= config_.depth; ++i) {
    skips.push_back(h);
    h = nn::Relu(conv(Layer("unet/down", i), h, 2));
  }
  for (int i = config_.depth; i >= 1; --i) {
    const Var skip = skips[static_cast<std::size_t>(i - 1)];
    const std::string name = Layer("unet/up", i);
    h = nn::Relu(nn::ConvTranspose1d(h, bind.Get(name + "/w"),
                                     bind.Get(name + "/b"), 2,
                                     static_cast<int>(skip.value().shape[1])));
    const Var parts[] = {h, skip};
    h = nn::Concat(parts);
  }
  return nn::ConvTranspose1d(h, bind.Get("unet/final/w"),
                             bind.Get("unet/final/b"), 1);
}

TapeOutputs DpConvCnp::Forward(nn::Binding& bind,
                               const dpsetconv::ContextSet& context,
                               std::span<const double> target_xs,
                               const accounting::PrivacyBudget& budget,
                               Rng& rng, const ForwardOptions& options) const {
  const dpsetconv::MechanismFlags& flags = options.flags;
  if (options.mode == dpsetconv::EncodeMode::kDeploy && !flags.AllEnabled()) {
    throw RefusalError(
        "the privacy mechanism cannot be partially disabled at deployment");
  }
  context.Validate();
  const grid::GridAxis& axis = grid_.axes[0];
  const double lo = axis.origin;
  const double hi = axis.Coordinate(axis.count - 1);
  for (double x : target_xs) {
    if (!(x >= lo && x <= hi)) {
      throw DomainError("target input " + std::to_string(x) +
                        " lies outside the model window");
    }
  }

  nn::Tape& tape = bind.tape();
  TapeOutputs out;
  out.mu = accounting::MuFromBudget(budget);
  const auto [t, clip] = TcMaps(bind, out.mu, context.size());
  out.t = t.scalar();
  out.clip = clip.scalar();

  const Var lambda = nn::Exp(bind.Get("encoder/log_lambda"));
  const Var weights = flags.enable_clip
                          ? ClipOutputs(context.ys, clip)
                          : tape.Constant(Tensor::Vector(context.ys));
  const Var channels = SetConvEncode(context.xs, weights, lambda, axis);
  Var density = nn::Slice(channels, 0, 1);
  Var signal = nn::Slice(channels, 1, 2);
  const std::size_t g_len = static_cast<std::size_t>(axis.count);

  const Var zero = tape.Constant(Tensor::Scalar(0.0));
  Var sigma_d = zero;
  Var sigma_s = zero;
  if (flags.enable_density_noise || flags.enable_signal_noise) {
    dpsetconv::UnitNoise drawn;
    const dpsetconv::UnitNoise* noise = options.noise;
    if (noise == nullptr) {
      drawn = dpsetconv::DrawUnitNoise(*NoiseFactors(lambda.scalar()), rng);
      noise = &drawn;
    }
    if (noise->density.size() != g_len || noise->signal.size() != g_len) {
      throw DomainError("noise fields do not match the model grid");
    }
    if (flags.enable_density_noise) {
      // sigma_d = sqrt(2) / (mu sqrt(1 - t))
      const Var one_minus_t = nn::AddScalar(nn::Scale(t, -1.0), 1.0);
      sigma_d = nn::Scale(nn::Exp(nn::Scale(nn::Log(one_minus_t), -0.5)),
                          std::numbers::sqrt2 / out.mu);
      const Var g = tape.Constant(Tensor({1, g_len}, noise->density));
      density = nn::Add(density, nn::MulByScalar(g, sigma_d));
    }
    if (flags.enable_signal_noise) {
      if (!std::isfinite(out.clip)) {
        throw DomainError("signal noise needs a finite clip threshold");
      }
      // sigma_s = 2 C / (mu sqrt(t))
      sigma_s = nn::Scale(
          nn::Mul(clip, nn::Exp(nn::Scale(nn::Log(t), -0.5))), 2.0 / out.mu);
      const Var g = tape.Constant(Tensor({1, g_len}, noise->signal));
      signal = nn::Add(signal, nn::MulByScalar(g, sigma_s));
    }
  }
  out.sigma_d = sigma_d.scalar();
  out.sigma_s = sigma_s.scalar();
  out.density = density;
  out.signal = signal;

  const double scale = config_.InputScale();
  const Var parts[] = {density, signal, nn::Fill(sigma_d, {1, g_len}),
                       nn::Fill(sigma_s, {1, g_len})};
  const Var h = Unet(bind, nn::Scale(nn::Concat(parts), scale));
  const Var dec_lambda =
      config_.share_decoder_lengthscale
          ? lambda
          : nn::Exp(bind.Get("decoder/log_lambda"));
  const Var smoothed = RbfSmooth(h, dec_lambda, axis, target_xs);
  out.mean = nn::Slice(smoothed, 0, 1);
  out.log_std = nn::Slice(smoothed, 1, 2);
  return out;
}

gp::GaussianPrediction DpConvCnp::Predict(
    const dpsetconv::ContextSet& context, std::span<const double> target_xs,
    const accounting::PrivacyBudget& budget, Rng& rng,
    const ForwardOptions& options) const {
  nn::Tape tape;
  nn::Binding bind(tape, params_, nullptr);
  const TapeOutputs out = Forward(bind, context, target_xs, budget, rng, options);
  gp::GaussianPrediction pred;
  pred.means = out.mean.value().values;
  pred.variances.resize(pred.means.size());
  const Tensor& ls = out.log_std.value();
  for (std::size_t i = 0; i < ls.size(); ++i) {
    pred.variances[i] = std::exp(2.0 * ls[i]);
  }
  return pred;
}

double DpConvCnp::TaskLoss(const taskgen::Task& task, Rng& rng,
                           const ForwardOptions& options,
                           nn::Gradients* grads) const {
  nn::Tape tape;
  nn::Binding bind(tape, params_, grads);
  const TapeOutputs out = Forward(bind, task.context, task.target_xs,
                                  task.budget, rng, options);
  const Var loss = GaussianNllLoss(out.mean, out.log_std, task.target_ys);
  if (grads != nullptr) tape.Backward(loss);
  return loss.scalar();
}

gp::GaussianPrediction MetaTest(const DpConvCnp& model,
                                const dpsetconv::ContextSet& context,
                                const accounting::PrivacyBudget& budget,
                                std::span<const double> target_xs, Rng& rng) {
  return model.Predict(context, target_xs, budget, rng, ForwardOptions{});
}

}  // namespace privcnp::model
