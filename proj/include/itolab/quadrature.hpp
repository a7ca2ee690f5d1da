#pragma once

#include <functional>
#include <vector>

#include "itolab/gaussian_moments.hpp"

namespace itolab {

using RealFunction = std::function<double(double)>;

/// Nodes and weights for integrals against exp(-t^2) on the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch rule of the given order, computed on first use and cached.
/// The returned reference stays valid for the life of the program.
const GaussHermiteRule& gauss_hermite_rule(int order);

/// E[f(u)] for u ~ N(a, s) with a fixed-order Gauss-Hermite rule. Exact for
/// polynomials of degree <= 2*order - 1.
double gauss_hermite_expect(const RealFunction& f, const GaussianParams& p, int order);

struct AdaptiveQuadratureOptions {
  int initial_order = 8;
  int max_order = 512;
  double relative_tolerance = 1e-10;
};

struct AdaptiveResult {
  double value = 0.0;
  int order = 0;  // order of the accepted estimate
};

/// Doubles the Gauss-Hermite order until two successive estimates agree to the
/// relative tolerance (absolute floor of tol * 1e-3 for values near zero).
/// Throws NonConvergence once the order would exceed `max_order`.
AdaptiveResult gauss_hermite_expect_adaptive(const RealFunction& f, const GaussianParams& p,
                                             const AdaptiveQuadratureOptions& options = {});

/// E[f(u)] by adaptive Gauss-Kronrod subdivision of the Gaussian integral.
/// Handles integrands with kinks (e.g. u|u|) that defeat Gauss-Hermite
/// convergence. Throws NonConvergence if the error estimate stays above
/// tolerance.
double gaussian_expect_kronrod(const RealFunction& f, const GaussianParams& p,
                               double relative_tolerance = 1e-12);

}  // namespace itolab
