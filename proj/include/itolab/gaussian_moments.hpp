#pragma once

#include "itolab/polynomial.hpp"

namespace itolab {

/// Mean and standard deviation of a normal law N(a, s), s > 0.
class GaussianParams {
 public:
  GaussianParams(double mean, double std);

  double mean() const noexcept { return mean_; }
  double std() const noexcept { return std_; }

 private:
  double mean_;
  double std_;
};

/// (n-1)!! for even n and 0 for odd n: E[eta^n] for eta ~ N(0, 1).
Rational standard_normal_moment(unsigned n);

/// E[u^k] for u ~ N(a, s), summed over the even central moments.
double gaussian_raw_moment(unsigned k, const GaussianParams& p);

/// Exact E[u^k] for rational mean and standard deviation.
Rational gaussian_raw_moment_exact(unsigned k, const Rational& mean, const Rational& std);

/// Symbolic E[(a + s*eta)^k] where a and s may themselves be polynomials in
/// (x, sigma, dt).
Polynomial gaussian_raw_moment_symbolic(unsigned k, const Polynomial& mean, const Polynomial& std);

/// E[poly(u)] for u ~ N(a, s); `poly` is read as a polynomial in x (= u). Any
/// sigma/dt symbols in `poly` are evaluated at `sigma` and `dt`.
double gaussian_expect_poly(const Polynomial& poly, const GaussianParams& p, double sigma = 0.0,
                            double dt = 0.0);

/// Exact counterpart of gaussian_expect_poly; `poly` must depend on x only.
Rational gaussian_expect_poly_exact(const Polynomial& poly, const Rational& mean, const Rational& std);

/// Error function, accurate to a few ulp over the real line.
double erf_eval(double z);

}  // namespace itolab
