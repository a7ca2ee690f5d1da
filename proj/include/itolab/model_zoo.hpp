#pragma once

#include <optional>
#include <string>

#include "itolab/noise_expansion.hpp"

namespace itolab {

/// Parameters of the built-in models. Unset sigma means "symbolic".
struct ModelParams {
  int exponent = 3;                 // power_attractor: R = -(x + sigma*eta)^n
  std::optional<Rational> sigma;    // noise amplitude
  Rational a = 1;                   // ou: R = -a*x + b*eta
  Rational b = 1;
};

/// Built-in rates:
///   power_attractor  R = -(x + sigma*eta)^n, n >= 1
///   additive_cubic   R = -x^3 + sigma*eta
///   ou               R = -a*x + b*eta   (sigma is b)
///   drag             R = -(v + sigma*eta)|v + sigma*eta|   (black box, numeric sigma)
/// Throws UnknownModel for any other name.
NoiseExpansion model_zoo(const std::string& name, const ModelParams& params);

/// Mean drag rate E[-(v + sigma*eta)|v + sigma*eta|] in closed form.
double drag_mean_rate(double v, double sigma);

/// Standard deviation of the drag rate, sqrt(E[u^4] - F^2) with
/// E[u^4] = v^4 + 6 v^2 sigma^2 + 3 sigma^4.
double drag_rate_std(double v, double sigma);

/// C = 3^{7/6} Gamma(2/3) / (2^{5/3} pi).
double naive_drag_normalization();

/// Stationary density (C / g^{2/3}) exp(-2|v|^3 / (3 g^2)) of the
/// constant-noise drag SDE dv = -v|v| dt + g dW.
double naive_drag_stationary_density(double v, double amplitude);

}  // namespace itolab
