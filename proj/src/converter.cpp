#include "itolab/converter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "itolab/error.hpp"
#include "itolab/gaussian_moments.hpp"

namespace itolab {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = 1.4142135623730950488;

void check_nonnegative_variance(const Polynomial& variance, bool sigma_symbolic) {
  std::vector<Rational> sigmas;
  if (sigma_symbolic) {
    sigmas = {Rational(1, 10), Rational(1, 2), Rational(1), Rational(2)};
  } else {
    sigmas = {Rational(0)};
  }
  for (const auto& s : sigmas) {
    for (int i = -20; i <= 20; ++i) {
      const Rational x(i, 2);
      const Rational v = variance.evaluate_exact(x, s);
      if (v < 0) {
        std::ostringstream os;
        os << "converted variance " << variance.to_string() << " is negative (" << v.get_d() << ") at x=" << x.get_d();
        if (sigma_symbolic) os << ", sigma=" << s.get_d();
        throw NegativeVariance(os.str());
      }
    }
  }
}

DriftDiffusion finish_moments(double mean, double second, double clamp) {
  double variance = second - mean * mean;
  if (variance < 0.0) {
    if (variance < -clamp * std::max(1.0, std::abs(second))) {
      std::ostringstream os;
      os << "E[R^2] - E[R]^2 = " << variance << " is negative beyond roundoff";
      throw NegativeVariance(os.str());
    }
    variance = 0.0;
  }
  return {mean, std::sqrt(variance)};
}

}  // namespace

ItoSde convert_poly(const NoiseExpansion& rate) {
  if (!rate.is_polynomial()) throw std::invalid_argument("convert_poly needs a polynomial noise expansion");
  const auto& c = rate.coefficients();
  const Polynomial sigma = Polynomial::variable(Var::sigma);

  Polynomial mean;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const Rational m = standard_normal_moment(static_cast<unsigned>(j));
    if (m != 0) mean += c[j] * sigma.pow(static_cast<unsigned>(j)) * Polynomial(m);
  }
  Polynomial second;
  for (std::size_t j = 0; j < c.size(); ++j) {
    for (std::size_t l = 0; l < c.size(); ++l) {
      const Rational m = standard_normal_moment(static_cast<unsigned>(j + l));
      if (m != 0) second += c[j] * c[l] * sigma.pow(static_cast<unsigned>(j + l)) * Polynomial(m);
    }
  }
  Polynomial variance = second - mean * mean;

  if (rate.sigma()) {
    mean = mean.substitute(Var::sigma, *rate.sigma());
    variance = variance.substitute(Var::sigma, *rate.sigma());
  }
  check_nonnegative_variance(variance, !rate.sigma().has_value());
  return ItoSde::from_polynomials(std::move(mean), std::move(variance), rate.info().label);
}

BlackBoxPlan plan_blackbox_quadrature(const NoiseExpansion& rate, std::span<const double> x_probe,
                                      const BlackBoxOptions& options) {
  if (options.method == QuadratureMethod::gauss_kronrod) return {QuadratureMethod::gauss_kronrod, 0};
  const GaussianParams unit(0.0, 1.0);
  int order = 0;
  try {
    for (double x : x_probe) {
      const auto r1 = gauss_hermite_expect_adaptive([&](double eta) { return rate.rate(x, eta); }, unit,
                                                    options.gauss_hermite);
      const auto r2 = gauss_hermite_expect_adaptive(
          [&](double eta) {
            const double r = rate.rate(x, eta);
            return r * r;
          },
          unit, options.gauss_hermite);
      order = std::max({order, r1.order, r2.order});
    }
  } catch (const NonConvergence&) {
    if (options.method == QuadratureMethod::gauss_hermite) throw;
    return {QuadratureMethod::gauss_kronrod, 0};
  }
  if (order == 0) order = std::max(2, options.gauss_hermite.initial_order);
  return {QuadratureMethod::gauss_hermite, order};
}

ItoSde convert_blackbox(const NoiseExpansion& rate, std::span<const double> x_probe, const BlackBoxOptions& options) {
  (void)rate.sigma_value();  // requires a bound amplitude
  const BlackBoxPlan plan = plan_blackbox_quadrature(rate, x_probe, options);
  const double clamp = options.variance_clamp;
  std::string label = rate.info().label.empty() ? "black box" : rate.info().label;

  if (plan.method == QuadratureMethod::gauss_hermite) {
    const GaussHermiteRule* rule = &gauss_hermite_rule(plan.gauss_hermite_order);
    return ItoSde::from_evaluator(
        [rate, rule, clamp](double x) {
          double s1 = 0.0;
          double s2 = 0.0;
          for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
            const double w = rule->weights[i];
            if (w == 0.0) continue;
            const double r = rate.rate(x, kSqrt2 * rule->nodes[i]);
            s1 += w * r;
            s2 += w * r * r;
          }
          return finish_moments(s1 / kSqrtPi, s2 / kSqrtPi, clamp);
        },
        std::move(label));
  }

  const double tol = options.kronrod_tolerance;
  return ItoSde::from_evaluator(
      [rate, tol, clamp](double x) {
        const GaussianParams unit(0.0, 1.0);
        const double mean = gaussian_expect_kronrod([&](double eta) { return rate.rate(x, eta); }, unit, tol);
        const double second = gaussian_expect_kronrod(
            [&](double eta) {
              const double r = rate.rate(x, eta);
              return r * r;
            },
            unit, tol);
        return finish_moments(mean, second, clamp);
      },
      std::move(label));
}

ItoSde naive_convert(const NoiseExpansion& rate) {
  const ModelInfo& info = rate.info();
  const std::string label = "naive " + info.label;
  if (!rate.is_polynomial()) {
    if (info.family != ModelFamily::drag)
      throw UnsupportedModel("naive conversion is defined only for built-in model families");
    const double s = rate.sigma_value();
    const double amplitude = s * s;
    return ItoSde::from_evaluator([amplitude](double v) { return DriftDiffusion{-v * std::abs(v), amplitude}; },
                                  label);
  }
  const auto& c = rate.coefficients();
  const std::size_t top = c.size() - 1;
  if (top == 0) return ItoSde::from_polynomials(c[0], Polynomial(0), label);
  if (!c[top].is_constant())
    throw UnsupportedModel("naive conversion needs an x-independent leading noise coefficient");
  const Polynomial sigma = Polynomial::variable(Var::sigma);
  // Constant noise of the size of the leading noise term: |c_top| sigma^top.
  Polynomial diffusion_sq = c[top] * c[top] * sigma.pow(static_cast<unsigned>(2 * top));
  Polynomial drift = c[0];
  if (rate.sigma()) diffusion_sq = diffusion_sq.substitute(Var::sigma, *rate.sigma());
  return ItoSde::from_polynomials(std::move(drift), std::move(diffusion_sq), label);
}

}  // namespace itolab
