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

#include "privcnp/accounting.h"

#include <cmath>
#include <numbers>
#include <string>

#include "privcnp/errors.h"

namespace privcnp::accounting {
namespace {

// Below this point erfc underflows, so the lower tail uses the asymptotic
// series of the Mills ratio instead. At -35 the truncation error of the
// series is below 1e-12 relative.
constexpr double kTailSwitch = -35.0;
constexpr int kBisectionIterations = 200;
constexpr int kNewtonIterations = 4;

void CheckMu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw DomainError("GDP parameter mu must be positive and finite, got " +
                      std::to_string(mu));
  }
}

void CheckSensitivity(double sensitivity) {
  if (!(sensitivity >= 0.0) || !std::isfinite(sensitivity)) {
    throw DomainError("sensitivity must be nonnegative, got " +
                      std::to_string(sensitivity));
  }
}

}  // namespace

void PrivacyBudget::Validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be nonnegative, got " +
                      std::to_string(epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1), got " +
                      std::to_string(delta));
  }
}

SensitivityPair SensitivityPair::ForSetConv(double clip_threshold,
                                            double kernel_bound) {
  return SensitivityPair{
      .delta_d_sq = 2.0 * kernel_bound,
      .delta_s_sq = 4.0 * clip_threshold * clip_threshold * kernel_bound,
      .clip_threshold = clip_threshold,
      .kernel_bound = kernel_bound};
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormalPdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double LogNormalCdf(double x) {
  if (x >= kTailSwitch) return std::log(NormalCdf(x));
  const double inv_x2 = 1.0 / (x * x);
  // 1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8
  const double series =
      1.0 + inv_x2 * (-1.0 + inv_x2 * (3.0 + inv_x2 * (-15.0 + inv_x2 * 105.0)));
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(series);
}

double DeltaFromMu(double mu, double epsilon) {
  CheckMu(mu);
  if (!(epsilon >= 0.0)) {
    throw DomainError("epsilon must be nonnegative");
  }
  const double a = -epsilon / mu + 0.5 * mu;
  const double b = -epsilon / mu - 0.5 * mu;
  const double log_first = LogNormalCdf(a);
  const double log_second = epsilon + LogNormalCdf(b);
  if (log_second >= log_first) return 0.0;
  const double delta = std::exp(log_first) * -std::expm1(log_second - log_first);
  return delta > 0.0 ? delta : 0.0;
}

double MuFromBudget(const PrivacyBudget& budget) {
  budget.Validate();
  const double eps = budget.epsilon;
  const double target = budget.delta;
  double lo = kMinMu;
  double hi = kMaxMu;
  if (DeltaFromMu(hi, eps) < target) {
    throw NumericalError("budget (eps=" + std::to_string(eps) +
                         ", delta=" + std::to_string(target) +
                         ") needs mu above " + std::to_string(kMaxMu));
  }
  if (DeltaFromMu(lo, eps) > target) {
    throw NumericalError("budget (eps=" + std::to_string(eps) +
                         ", delta=" + std::to_string(target) +
                         ") needs mu below " + std::to_string(kMinMu));
  }
  // Geometric bisection: the bracket spans eleven orders of magnitude.
  for (int i = 0; i < kBisectionIterations && hi - lo > 1e-15 * hi; ++i) {
    const double mid = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (DeltaFromMu(mid, eps) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double mu = 0.5 * (lo + hi);
  // d delta / d mu = phi(-eps/mu + mu/2) since e^eps phi(b) = phi(a).
  for (int i = 0; i < kNewtonIterations; ++i) {
    const double slope = NormalPdf(-eps / mu + 0.5 * mu);
    if (!(slope > 0.0)) break;
    const double next = mu - (DeltaFromMu(mu, eps) - target) / slope;
    if (!(next >= lo && next <= hi)) break;
    mu = next;
  }
  return mu;
}

double ComposeGdp(std::span<const double> mus) {
  double sum_sq = 0.0;
  for (double mu : mus) {
    CheckMu(mu);
    sum_sq += mu * mu;
  }
  return std::sqrt(sum_sq);
}

double GaussianMechanismSigma(double sensitivity, double mu) {
  CheckSensitivity(sensitivity);
  CheckMu(mu);
  return sensitivity / mu;
}

double ClassicalFunctionalSigma(double sensitivity,
                                const PrivacyBudget& budget) {
  budget.Validate();
  CheckSensitivity(sensitivity);
  if (!(budget.epsilon > 0.0) || budget.epsilon > 1.0) {
    throw DomainError(
        "classical functional mechanism bound requires 0 < eps <= 1, got " +
        std::to_string(budget.epsilon));
  }
  return sensitivity / budget.epsilon *
         std::sqrt(2.0 * std::log(2.0 / budget.delta));
}

double RdpFunctionalSigma(double sensitivity, const PrivacyBudget& budget) {
  budget.Validate();
  CheckSensitivity(sensitivity);
  if (!(budget.epsilon > 0.0)) {
    throw DomainError("RDP functional mechanism requires eps > 0");
  }
  const double eps = budget.epsilon;
  const double sens_sq = sensitivity * sensitivity;
  // eps s^2 - b s - Delta^2 / 2 = 0 with b = 2 sqrt(-Delta^2 ln(delta) / 2).
  const double b = 2.0 * std::sqrt(-sens_sq * std::log(budget.delta) / 2.0);
  const double disc = b * b + 2.0 * eps * sens_sq;
  return (b + std::sqrt(disc)) / (2.0 * eps);
}

double RdpOptimalOrder(double sensitivity, double sigma, double delta) {
  return std::sqrt(-2.0 * sigma * sigma * std::log(delta) /
                   (sensitivity * sensitivity)) +
         1.0;
}

double RdpEpsilon(double sensitivity, double sigma, double alpha,
                  double delta) {
  return alpha * sensitivity * sensitivity / (2.0 * sigma * sigma) -
         std::log(delta) / (alpha - 1.0);
}

double GdpFunctionalSigma(double sensitivity, const PrivacyBudget& budget) {
  CheckSensitivity(sensitivity);
  return sensitivity / MuFromBudget(budget);
}

NoiseScales SetConvNoiseScalesForMu(double mu, double clip, double t) {
  CheckMu(mu);
  if (!(t > 0.0 && t < 1.0)) {
    throw DomainError("noise split t must lie in (0, 1), got " +
                      std::to_string(t));
  }
  if (!(clip > 0.0) || !std::isfinite(clip)) {
    throw DomainError("clip threshold must be positive and finite, got " +
                      std::to_string(clip));
  }
  return NoiseScales{
      .sigma_d = std::sqrt(2.0 / ((1.0 - t) * mu * mu)),
      .sigma_s = std::sqrt(4.0 * clip * clip / (t * mu * mu)),
      .t = t};
}

NoiseScales SetConvNoiseScales(const PrivacyBudget& budget, double clip,
                               double t) {
  return SetConvNoiseScalesForMu(MuFromBudget(budget), clip, t);
}

double SetConvReleaseMu(const SensitivityPair& sens, double sigma_d,
                        double sigma_s) {
  if (!(sigma_d > 0.0) || !(sigma_s > 0.0)) {
    throw DomainError("noise multipliers must be positive");
  }
  return std::sqrt(sens.delta_s_sq / (sigma_s * sigma_s) +
                   sens.delta_d_sq / (sigma_d * sigma_d));
}

double NaivePointwiseMu(int n_points, double clip, double sigma) {
  if (n_points < 1) throw DomainError("need at least one released point");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const double delta_s_sq = 4.0 * clip * clip;
  const double delta_d_sq = 1.0;
  return std::sqrt(n_points * (delta_s_sq + delta_d_sq) / (sigma * sigma));
}

}  // namespace privcnp::accounting
