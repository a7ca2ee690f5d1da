#include "itolab/model_zoo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "itolab/error.hpp"
#include "itolab/gaussian_moments.hpp"

namespace itolab {

namespace {

std::string sigma_label(const std::optional<Rational>& sigma) {
  return sigma ? std::to_string(sigma->get_d()) : std::string("sigma");
}

}  // namespace

NoiseExpansion model_zoo(const std::string& name, const ModelParams& params) {
  const Polynomial x = Polynomial::variable(Var::x);

  if (name == "power_attractor") {
    const int n = params.exponent;
    if (n < 1) throw std::invalid_argument("power_attractor exponent must be a positive integer");
    // -(x + s)^n = sum_j -C(n, j) x^{n-j} s^j with s = sigma*eta
    std::vector<Polynomial> coefficients;
    mpz_class binom;
    for (int j = 0; j <= n; ++j) {
      mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(j));
      coefficients.push_back(Polynomial(Rational(-binom)) * x.pow(static_cast<unsigned>(n - j)));
    }
    ModelInfo info{ModelFamily::power_attractor, n,
                   "power_attractor(n=" + std::to_string(n) + ", sigma=" + sigma_label(params.sigma) + ")"};
    return NoiseExpansion::polynomial(std::move(coefficients), params.sigma, std::move(info));
  }

  if (name == "additive_cubic") {
    ModelInfo info{ModelFamily::additive_cubic, 3, "additive_cubic(sigma=" + sigma_label(params.sigma) + ")"};
    return NoiseExpansion::polynomial({-x.pow(3), Polynomial(1)}, params.sigma, std::move(info));
  }

  if (name == "ou") {
    if (params.a <= 0) throw std::invalid_argument("ou needs a > 0");
    if (params.b <= 0) throw std::invalid_argument("ou needs b > 0");
    ModelInfo info{ModelFamily::ornstein_uhlenbeck, 1,
                   "ou(a=" + std::to_string(params.a.get_d()) + ", b=" + std::to_string(params.b.get_d()) + ")"};
    // The noise amplitude of the expansion is b itself.
    return NoiseExpansion::polynomial({Polynomial(Rational(-params.a)) * x, Polynomial(1)}, params.b,
                                      std::move(info));
  }

  if (name == "drag") {
    if (!params.sigma) throw std::invalid_argument("drag is a black-box model and needs a numeric sigma");
    const double s = params.sigma->get_d();
    ModelInfo info{ModelFamily::drag, 2, "drag(sigma=" + sigma_label(params.sigma) + ")"};
    return NoiseExpansion::black_box(
        [s](double v, double eta) {
          const double u = v + s * eta;
          return -u * std::abs(u);
        },
        s, std::move(info));
  }

  throw UnknownModel("unknown model '" + name + "' (expected power_attractor, additive_cubic, ou or drag)");
}

double drag_mean_rate(double v, double sigma) {
  const double z = v / (sigma * std::numbers::sqrt2);
  return -(sigma * sigma + v * v) * erf_eval(z) -
         std::sqrt(2.0 / std::numbers::pi) * v * sigma * std::exp(-v * v / (2.0 * sigma * sigma));
}

double drag_rate_std(double v, double sigma) {
  const double f = drag_mean_rate(v, sigma);
  const double s2 = sigma * sigma;
  const double fourth = v * v * v * v + 6.0 * v * v * s2 + 3.0 * s2 * s2;
  return std::sqrt(std::max(0.0, fourth - f * f));
}

double naive_drag_normalization() {
  return std::pow(3.0, 7.0 / 6.0) * std::tgamma(2.0 / 3.0) / (std::pow(2.0, 5.0 / 3.0) * std::numbers::pi);
}

double naive_drag_stationary_density(double v, double amplitude) {
  const double a = std::abs(v);
  const double g = amplitude;
  return naive_drag_normalization() / std::pow(g, 2.0 / 3.0) * std::exp(-2.0 * a * a * a / (3.0 * g * g));
}

}  // namespace itolab
