#include "itolab/noise_expansion.hpp"

#include <cmath>
#include <stdexcept>

#include "itolab/error.hpp"

namespace itolab {

NoiseExpansion NoiseExpansion::polynomial(std::vector<Polynomial> coefficients, std::optional<Rational> sigma,
                                          ModelInfo info) {
  if (coefficients.empty()) throw std::invalid_argument("polynomial noise expansion needs at least one term");
  for (const auto& c : coefficients) {
    if (c.depends_on(Var::sigma) || c.depends_on(Var::dt))
      throw std::invalid_argument("noise expansion coefficients must depend on x only");
  }
  if (sigma && *sigma <= 0) throw std::invalid_argument("noise amplitude sigma must be positive");
  NoiseExpansion out;
  out.coefficients_ = std::move(coefficients);
  for (const auto& c : out.coefficients_) out.compiled_.emplace_back(c);
  out.sigma_ = std::move(sigma);
  if (out.sigma_) out.sigma_->canonicalize();
  if (out.sigma_) out.sigma_double_ = out.sigma_->get_d();
  out.info_ = std::move(info);
  return out;
}

NoiseExpansion NoiseExpansion::black_box(RateFunction rate, double sigma, ModelInfo info) {
  if (!rate) throw std::invalid_argument("black-box noise expansion needs a rate function");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("black-box noise amplitude sigma must be positive");
  NoiseExpansion out;
  out.rate_ = std::move(rate);
  out.sigma_ = to_rational(sigma);
  out.sigma_double_ = sigma;
  out.info_ = std::move(info);
  return out;
}

double NoiseExpansion::sigma_value() const {
  if (!sigma_) throw UnboundSymbol("noise amplitude sigma is symbolic");
  return sigma_double_;
}

double NoiseExpansion::rate(double x, double eta) const {
  if (!is_polynomial()) return rate_(x, eta);
  const double noise = sigma_value() * eta;
  double acc = 0.0;
  for (auto it = compiled_.rbegin(); it != compiled_.rend(); ++it) acc = acc * noise + (*it)(x);
  return acc;
}

NoiseExpansion NoiseExpansion::with_sigma(const Rational& sigma) const {
  if (sigma <= 0) throw std::invalid_argument("noise amplitude sigma must be positive");
  if (!is_polynomial())
    throw std::invalid_argument("black-box expansions capture sigma in their rate function");
  return polynomial(coefficients_, sigma, info_);
}

}  // namespace itolab
