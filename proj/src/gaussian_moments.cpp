#include "itolab/gaussian_moments.hpp"

#include <cmath>
#include <stdexcept>

#include "itolab/error.hpp"

namespace itolab {

GaussianParams::GaussianParams(double mean, double std) : mean_(mean), std_(std) {
  if (!std::isfinite(mean) || !std::isfinite(std))
    throw std::invalid_argument("GaussianParams: non-finite mean or std");
  if (!(std > 0.0)) throw std::invalid_argument("GaussianParams: std must be positive");
}

Rational standard_normal_moment(unsigned n) {
  if (n % 2 != 0) return 0;
  mpz_class acc = 1;
  for (unsigned j = n; j > 1; j -= 2) acc *= (j - 1);
  return Rational(acc);
}

double gaussian_raw_moment(unsigned k, const GaussianParams& p) {
  // sum_{i even} C(k, i) a^{k-i} s^i (i-1)!!
  const double a = p.mean();
  const double s = p.std();
  double total = 0.0;
  double binom = 1.0;       // C(k, i)
  double double_fact = 1.0;  // (i-1)!!
  for (unsigned i = 0; i <= k; i += 2) {
    if (i > 0) {
      binom *= static_cast<double>(k - i + 2) * static_cast<double>(k - i + 1) /
               (static_cast<double>(i - 1) * static_cast<double>(i));
      double_fact *= static_cast<double>(i - 1);
    }
    const double a_pow = (k - i == 0) ? 1.0 : std::pow(a, static_cast<double>(k - i));
    total += binom * double_fact * a_pow * std::pow(s, static_cast<double>(i));
  }
  return total;
}

Rational gaussian_raw_moment_exact(unsigned k, const Rational& mean_in, const Rational& std_in) {
  Rational mean = mean_in, std = std_in;
  mean.canonicalize();
  std.canonicalize();
  Rational total = 0;
  mpz_class binom;
  for (unsigned i = 0; i <= k; i += 2) {
    mpz_bin_uiui(binom.get_mpz_t(), k, i);
    Rational a_pow = 1;
    for (unsigned j = 0; j < k - i; ++j) a_pow *= mean;
    Rational s_pow = 1;
    for (unsigned j = 0; j < i; ++j) s_pow *= std;
    total += Rational(binom) * standard_normal_moment(i) * a_pow * s_pow;
  }
  return total;
}

Polynomial gaussian_raw_moment_symbolic(unsigned k, const Polynomial& mean, const Polynomial& std) {
  Polynomial total;
  mpz_class binom;
  for (unsigned i = 0; i <= k; i += 2) {
    mpz_bin_uiui(binom.get_mpz_t(), k, i);
    total += Polynomial(Rational(binom) * standard_normal_moment(i)) * mean.pow(k - i) * std.pow(i);
  }
  return total;
}

double gaussian_expect_poly(const Polynomial& poly, const GaussianParams& p, double sigma, double dt) {
  const auto parts = poly.coefficients_in(Var::x);
  double total = 0.0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].is_zero()) continue;
    total += parts[k].evaluate(0.0, sigma, dt) * gaussian_raw_moment(static_cast<unsigned>(k), p);
  }
  return total;
}

Rational gaussian_expect_poly_exact(const Polynomial& poly, const Rational& mean, const Rational& std) {
  if (poly.depends_on(Var::sigma) || poly.depends_on(Var::dt))
    throw UnboundSymbol("gaussian_expect_poly_exact: polynomial must depend on x only");
  const auto parts = poly.coefficients_in(Var::x);
  Rational total = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].is_zero()) continue;
    total += parts[k].constant_value() * gaussian_raw_moment_exact(static_cast<unsigned>(k), mean, std);
  }
  return total;
}

double erf_eval(double z) { return std::erf(z); }

}  // namespace itolab
