#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "itolab/ito_sde.hpp"

namespace itolab {

/// Probability density sampled at the centres of n uniform cells on
/// [x_min, x_max].
struct GridDensity {
  double x_min = -1.0;
  double x_max = 1.0;
  std::vector<double> values;

  GridDensity() = default;
  GridDensity(double lo, double hi, std::size_t n);

  std::size_t size() const noexcept { return values.size(); }
  double h() const noexcept { return (x_max - x_min) / static_cast<double>(values.size()); }
  double x(std::size_t i) const noexcept { return x_min + (static_cast<double>(i) + 0.5) * h(); }
  /// Sum of rho_i h, compensated.
  double mass() const;
  void normalize();

  static GridDensity gaussian(double lo, double hi, std::size_t n, double mean, double std);
  static GridDensity uniform(double lo, double hi, std::size_t n);
};

enum class TimeScheme { implicit, explicit_euler };

struct FpConfig {
  double W = 8.0;            // half-width in equilibrium standard deviations
  std::size_t n = 4096;      // cells
  double dt = 0.01;          // time step
  double T = 100.0;          // horizon
  double eps_stat = 1e-10;   // stationarity tolerance on ||rho' - rho||_1 / dt
  TimeScheme scheme = TimeScheme::implicit;
  /// Fixed domain; when unset the domain comes from domain_autoscale.
  std::optional<std::pair<double, double>> domain;
  double pilot_T = 10.0;     // horizon of each autoscale pilot run
  std::size_t pilot_n = 1024;
};

void validate(const FpConfig& cfg);

/// Conservative Scharfetter-Gummel (Chang-Cooper type) discretisation of
/// d rho/dt = -d/dx (F rho) + 1/2 d^2/dx^2 (G^2 rho) with zero-flux walls.
///
/// The face flux is J = a_f rho_i - b_f rho_{i+1}; a_f, b_f >= 0 are exponentially
/// fitted so that discrete equilibria solve J = 0 to second order in h.
class FpOperator {
 public:
  FpOperator(const ItoSde& sde, double x_min, double x_max, std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double h() const noexcept { return h_; }

  /// Largest positivity-preserving explicit step, h / max_i (a_i + b_{i-1}).
  double explicit_positivity_bound() const noexcept { return explicit_bound_; }

  /// One step in place. Backward Euler solves a tridiagonal M-matrix system
  /// (unconditionally positive); the explicit step requires
  /// dt <= explicit_positivity_bound(). Mass is restored to its value before the
  /// step; the return value is the relative drift that was removed.
  /// Throws InstabilityDetected on a non-finite cell, clipped negative mass of
  /// 1e-10 or more, or a mass drift of 1e-10 or more.
  double step(std::vector<double>& rho, double dt, TimeScheme scheme) const;

  /// Net outward flux per unit time if both walls were absorbing, estimated from
  /// the edge cells.
  double boundary_leakage(const std::vector<double>& rho) const;

  const std::vector<double>& a() const noexcept { return a_; }
  const std::vector<double>& b() const noexcept { return b_; }

 private:
  std::size_t n_;
  double h_;
  std::vector<double> a_;  // per interior face, n - 1 entries
  std::vector<double> b_;
  double left_escape_ = 0.0;
  double right_escape_ = 0.0;
  double explicit_bound_ = 0.0;
  // Cached tridiagonal factorisation for the last implicit dt.
  mutable double cached_dt_ = -1.0;
  mutable std::vector<double> c_prime_;
  mutable std::vector<double> inv_denominator_;
  mutable std::vector<double> lower_;
};

/// Fixed-dt single step with fresh coefficients. Throws InstabilityDetected on
/// a non-finite cell or negative mass below -1e-10; smaller negative values are
/// clipped and the mass restored.
GridDensity fp_step(const GridDensity& rho, const ItoSde& sde, double dt, TimeScheme scheme = TimeScheme::implicit);

struct FpDiagnostics {
  double t = 0.0;
  std::size_t steps = 0;
  double dt = 0.0;                       // step actually used
  double stationarity_residual = 0.0;    // ||rho' - rho||_1 / dt at the last step
  bool equilibrated = false;             // false: NotEquilibrated, horizon reached first
  double boundary_leakage = 0.0;
  double max_mass_error = 0.0;           // over all steps, before roundoff restoration
  /// Integral of rho (2 x F + G^2): the k = 1 equilibrium moment identity, raw
  /// and divided by the integral of rho (|2 x F| + G^2).
  double relation_residual = 0.0;
  double relation_residual_normalized = 0.0;
};

struct FpResult {
  GridDensity rho;
  FpDiagnostics diagnostics;
};

/// Evolves until stationary or t = T. Without rho0 the start is a Gaussian of
/// std (half-width / W) centred on the domain.
FpResult evolve_to_equilibrium(const ItoSde& sde, const FpConfig& cfg,
                               const std::optional<GridDensity>& rho0 = std::nullopt);

struct MomentEstimates {
  std::map<int, double> moments;     // midpoint-rule raw moments
  std::map<int, double> tail_ratio;  // |contribution of the two edge cells| / sum of |contributions|
};

MomentEstimates grid_moments(const GridDensity& rho, const std::vector<int>& orders);

struct AutoscaleResult {
  double x_min = 0.0;
  double x_max = 0.0;
  double std = 0.0;
  int iterations = 0;
  bool converged = false;  // std settled within 10% before the 5-iteration cap
};

/// Pilot runs that set the half-width to W standard deviations of the
/// pilot equilibrium, until the std estimate stabilises within 10% (at most 5
/// iterations). Throws AutoscaleDiverged if the estimate grows more than 10x.
AutoscaleResult domain_autoscale(const ItoSde& sde, const FpConfig& cfg);

/// CSV with header `x,rho`.
std::string density_csv(const GridDensity& rho);
/// `key = value` lines.
std::string diagnostics_text(const FpDiagnostics& d);

}  // namespace itolab
