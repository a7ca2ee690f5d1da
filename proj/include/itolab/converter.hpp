#pragma once

#include <span>

#include "itolab/ito_sde.hpp"
#include "itolab/noise_expansion.hpp"
#include "itolab/quadrature.hpp"

namespace itolab {

/// Exact conversion of a polynomial-in-eta rate: F = E[R], G^2 = E[R^2] - F^2,
/// with Gaussian moments taken term by term in rational arithmetic. Sigma stays
/// symbolic unless the expansion binds it. Throws NegativeVariance if G^2 is
/// negative at any diagnostic sample point.
ItoSde convert_poly(const NoiseExpansion& rate);

enum class QuadratureMethod {
  automatic,      // Gauss-Hermite when it converges at every probe, else Gauss-Kronrod
  gauss_hermite,  // fixed order chosen by adaptive doubling at the probes
  gauss_kronrod,
};

struct BlackBoxOptions {
  QuadratureMethod method = QuadratureMethod::automatic;
  AdaptiveQuadratureOptions gauss_hermite;
  double kronrod_tolerance = 1e-12;
  /// Negative E[R^2] - F^2 down to -clamp * max(1, E[R^2]) is roundoff and
  /// clamps to zero; anything lower raises NegativeVariance.
  double variance_clamp = 1e-10;
};

/// Numerical conversion of any rate R(x, eta) (needs a bound sigma). The
/// quadrature order is fixed by adaptive convergence at `x_probe`; the returned
/// SDE evaluates F and G at any x.
ItoSde convert_blackbox(const NoiseExpansion& rate, std::span<const double> x_probe,
                        const BlackBoxOptions& options = {});

/// Which quadrature convert_blackbox settled on, for diagnostics.
struct BlackBoxPlan {
  QuadratureMethod method = QuadratureMethod::gauss_kronrod;
  int gauss_hermite_order = 0;
};
BlackBoxPlan plan_blackbox_quadrature(const NoiseExpansion& rate, std::span<const double> x_probe,
                                      const BlackBoxOptions& options = {});

/// Naive reading of a built-in model: drift R(x, 0) plus constant noise of the
/// size of the leading noise term (sigma^n for -(x + sigma*eta)^n, sigma^2 for
/// drag). Throws UnsupportedModel for custom rates.
ItoSde naive_convert(const NoiseExpansion& rate);

}  // namespace itolab
