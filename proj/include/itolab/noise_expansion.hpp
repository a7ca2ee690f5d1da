#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "itolab/polynomial.hpp"

namespace itolab {

enum class ModelFamily { power_attractor, additive_cubic, ornstein_uhlenbeck, drag, custom };

/// Where a right-hand side came from; `naive_convert` keys off this.
struct ModelInfo {
  ModelFamily family = ModelFamily::custom;
  int exponent = 0;  // power_attractor only
  std::string label;
};

/// Stochastic rate R(x, eta) of a Langevin-type equation dx/dt = R(x, eta),
/// eta standard normal white noise.
///
/// Two representations:
///  * polynomial: R = sum_j c_j(x) * (sigma*eta)^j with exact coefficients c_j
///    in x and sigma either symbolic or bound to an exact value;
///  * black box: any real function R(x, eta) plus a numeric noise amplitude.
/// Time never enters, so only autonomous equations are representable.
class NoiseExpansion {
 public:
  using RateFunction = std::function<double(double x, double eta)>;

  /// `coefficients[j]` multiplies (sigma*eta)^j and must depend on x only.
  static NoiseExpansion polynomial(std::vector<Polynomial> coefficients,
                                   std::optional<Rational> sigma = std::nullopt, ModelInfo info = {});
  static NoiseExpansion black_box(RateFunction rate, double sigma, ModelInfo info = {});

  bool is_polynomial() const noexcept { return !coefficients_.empty(); }
  const std::vector<Polynomial>& coefficients() const noexcept { return coefficients_; }

  /// Bound noise amplitude; empty when sigma is symbolic.
  const std::optional<Rational>& sigma() const noexcept { return sigma_; }
  double sigma_value() const;

  const ModelInfo& info() const noexcept { return info_; }

  /// R(x, eta). Polynomial expansions need a bound sigma.
  double rate(double x, double eta) const;

  NoiseExpansion with_sigma(const Rational& sigma) const;

 private:
  std::vector<Polynomial> coefficients_;
  std::vector<CompiledPolynomial> compiled_;
  RateFunction rate_;
  std::optional<Rational> sigma_;
  double sigma_double_ = 0.0;
  ModelInfo info_;
};

}  // namespace itolab
