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

// Privacy calibration for the Gaussian and functional mechanisms.
//
// Budgets are (epsilon, delta) pairs; internally everything is converted to a
// Gaussian-DP parameter mu, which composes in quadrature and maps directly to
// a noise multiplier. Three accountants for the functional mechanism are
// provided so they can be compared on equal footing:
//
//   classical  c = (Delta / eps) * sqrt(2 ln(2 / delta)), valid for eps <= 1
//   rdp        smallest sigma from the Renyi-DP bound at the optimal order
//   gdp        sigma = Delta / mu(eps, delta)
//
// All functions are pure.

#ifndef PRIVCNP_ACCOUNTING_H_
#define PRIVCNP_ACCOUNTING_H_

#include <span>

namespace privcnp::accounting {

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-3;

  // Throws DomainError unless epsilon >= 0 and 0 < delta < 1.
  void Validate() const;
};

// Squared RKHS sensitivities of the density and signal channels for a kernel
// bounded by kernel_bound (C_k) and outputs clipped at clip_threshold (C).
struct SensitivityPair {
  double delta_d_sq;
  double delta_s_sq;
  double clip_threshold;
  double kernel_bound;

  static SensitivityPair ForSetConv(double clip_threshold,
                                    double kernel_bound = 1.0);
};

struct NoiseScales {
  double sigma_d;
  double sigma_s;
  double t;
};

// Upper bound of the bracket searched by MuFromBudget.
inline constexpr double kMaxMu = 100.0;
inline constexpr double kMinMu = 1e-9;

// Standard normal CDF and its logarithm. LogNormalCdf stays finite far into
// the lower tail where NormalCdf underflows.
double NormalCdf(double x);
double LogNormalCdf(double x);
double NormalPdf(double x);

// delta(eps) = Phi(-eps/mu + mu/2) - e^eps Phi(-eps/mu - mu/2).
double DeltaFromMu(double mu, double epsilon);

// Inverts DeltaFromMu in mu by bracketed bisection on [kMinMu, kMaxMu]
// followed by Newton polishing. Throws NumericalError when the budget needs
// mu outside the bracket.
double MuFromBudget(const PrivacyBudget& budget);

// sqrt(sum mu_i^2). The empty composition is 0.
double ComposeGdp(std::span<const double> mus);

// sigma = sensitivity / mu.
double GaussianMechanismSigma(double sensitivity, double mu);

// Classical functional-mechanism multiplier. Only proven for eps <= 1, so
// larger eps is rejected.
double ClassicalFunctionalSigma(double sensitivity,
                                const PrivacyBudget& budget);

// Positive root of -eps s^2 + 2 sqrt(-Delta^2 ln(delta) / 2) s + Delta^2/2.
double RdpFunctionalSigma(double sensitivity, const PrivacyBudget& budget);

// Optimal Renyi order alpha* = sqrt(-2 sigma^2 ln(delta) / Delta^2) + 1 and
// the epsilon the RDP conversion yields at (alpha, sigma).
double RdpOptimalOrder(double sensitivity, double sigma, double delta);
double RdpEpsilon(double sensitivity, double sigma, double alpha,
                  double delta);

double GdpFunctionalSigma(double sensitivity, const PrivacyBudget& budget);

// Splits the budget between the two SetConv channels with weight t on the
// signal channel:
//   sigma_s^2 = 4 C^2 / (t mu^2),   sigma_d^2 = 2 / ((1 - t) mu^2).
NoiseScales SetConvNoiseScales(const PrivacyBudget& budget, double clip,
                               double t);
// Same split for a known mu.
NoiseScales SetConvNoiseScalesForMu(double mu, double clip, double t);

// mu of releasing both channels with the given noise multipliers:
// sqrt(Delta_s^2 / sigma_s^2 + Delta_d^2 / sigma_d^2).
double SetConvReleaseMu(const SensitivityPair& sens, double sigma_d,
                        double sigma_s);

// Naive alternative: n pointwise Gaussian releases of (r_d(x), r_s(x)) with
// L2 sensitivities Delta_s^2 = 4 C^2 and Delta_d^2 = 1.
double NaivePointwiseMu(int n_points, double clip, double sigma);

}  // namespace privcnp::accounting

#endif  // PRIVCNP_ACCOUNTING_H_
