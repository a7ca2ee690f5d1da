#include "itolab/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "itolab/error.hpp"

namespace itolab {

namespace {

constexpr double kMassTolerance = 1e-10;

// Bernoulli function z / (e^z - 1).
double bernoulli(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - 0.5 * z;
  return z / std::expm1(z);
}

// Neumaier-compensated sum.
double compensated_sum(const std::vector<double>& v) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

struct FaceCoefficients {
  double a = 0.0;
  double b = 0.0;
};

// Flux J = a rho_left - b rho_right across a face at xf between cells whose
// diffusivities are d_left and d_right.
FaceCoefficients face(double drift_at_face, double d_face, double d_left, double d_right, double h) {
  const double advection = drift_at_face - (d_right - d_left) / h;
  if (!(d_face > 0.0)) return {std::max(advection, 0.0), std::max(-advection, 0.0)};
  const double w = advection * h / d_face;
  const double scale = d_face / h;
  return {scale * bernoulli(-w), scale * bernoulli(w)};
}

double half_square(double g) { return 0.5 * g * g; }

}  // namespace

GridDensity::GridDensity(double lo, double hi, std::size_t n) : x_min(lo), x_max(hi), values(n, 0.0) {
  if (!(hi > lo)) throw std::invalid_argument("GridDensity: empty domain");
  if (n < 2) throw std::invalid_argument("GridDensity: need at least two cells");
}

double GridDensity::mass() const { return compensated_sum(values) * h(); }

void GridDensity::normalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) throw InstabilityDetected("cannot normalise a density of mass " + std::to_string(m));
  for (double& v : values) v /= m;
}

GridDensity GridDensity::gaussian(double lo, double hi, std::size_t n, double mean, double std) {
  if (!(std > 0.0)) throw std::invalid_argument("GridDensity::gaussian: std must be positive");
  GridDensity rho(lo, hi, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (rho.x(i) - mean) / std;
    rho.values[i] = std::exp(-0.5 * z * z);
  }
  rho.normalize();
  return rho;
}

GridDensity GridDensity::uniform(double lo, double hi, std::size_t n) {
  GridDensity rho(lo, hi, n);
  std::fill(rho.values.begin(), rho.values.end(), 1.0);
  rho.normalize();
  return rho;
}

void validate(const FpConfig& cfg) {
  if (cfg.n < 64) throw std::invalid_argument("FpConfig: n must be >= 64");
  if (!(cfg.W > 0.0)) throw std::invalid_argument("FpConfig: W must be positive");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("FpConfig: dt must be positive");
  if (!(cfg.T > 0.0)) throw std::invalid_argument("FpConfig: T must be positive");
  if (!(cfg.eps_stat >= 0.0)) throw std::invalid_argument("FpConfig: eps_stat must be nonnegative");
  if (cfg.domain && !(cfg.domain->second > cfg.domain->first)) throw std::invalid_argument("FpConfig: empty domain");
}

FpOperator::FpOperator(const ItoSde& sde, double x_min, double x_max, std::size_t n)
    : n_(n), h_((x_max - x_min) / static_cast<double>(n)) {
  if (n < 2) throw std::invalid_argument("FpOperator: need at least two cells");
  if (!(x_max > x_min)) throw std::invalid_argument("FpOperator: empty domain");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = half_square(sde.diffusion(x_min + (static_cast<double>(i) + 0.5) * h_));
  a_.resize(n - 1);
  b_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double xf = x_min + static_cast<double>(i + 1) * h_;
    const auto [f, g] = sde.evaluate(xf);
    const auto c = face(f, half_square(g), d[i], d[i + 1], h_);
    a_[i] = c.a;
    b_[i] = c.b;
  }
  {
    const auto [f, g] = sde.evaluate(x_min);
    left_escape_ = face(f, half_square(g), half_square(sde.diffusion(x_min - 0.5 * h_)), d[0], h_).b;
  }
  {
    const auto [f, g] = sde.evaluate(x_max);
    right_escape_ = face(f, half_square(g), d[n - 1], half_square(sde.diffusion(x_max + 0.5 * h_)), h_).a;
  }
  double max_out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double out = (i + 1 < n ? a_[i] : 0.0) + (i > 0 ? b_[i - 1] : 0.0);
    if (!std::isfinite(out)) throw InstabilityDetected("non-finite drift or diffusion on the grid");
    max_out = std::max(max_out, out);
  }
  explicit_bound_ = max_out > 0.0 ? h_ / max_out : std::numeric_limits<double>::infinity();
}

double FpOperator::step(std::vector<double>& rho, double dt, TimeScheme scheme) const {
  if (rho.size() != n_) throw std::invalid_argument("FpOperator::step: grid size mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("FpOperator::step: dt must be positive");
  const double mass_before = compensated_sum(rho);
  const double r = dt / h_;
  const std::size_t n = n_;

  if (scheme == TimeScheme::explicit_euler) {
    if (dt > explicit_bound_ * (1.0 + 1e-12))
      throw std::invalid_argument("explicit step dt=" + std::to_string(dt) + " exceeds the positivity bound " +
                                  std::to_string(explicit_bound_));
    std::vector<double> flux(n + 1, 0.0);  // flux[i] across the left face of cell i
    for (std::size_t i = 0; i + 1 < n; ++i) flux[i + 1] = a_[i] * rho[i] - b_[i] * rho[i + 1];
    for (std::size_t i = 0; i < n; ++i) rho[i] -= r * (flux[i + 1] - flux[i]);
  } else {
    if (dt != cached_dt_) {
      c_prime_.assign(n, 0.0);
      inv_denominator_.assign(n, 0.0);
      lower_.assign(n, 0.0);
      double previous_c = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double out = (i + 1 < n ? a_[i] : 0.0) + (i > 0 ? b_[i - 1] : 0.0);
        const double diag = 1.0 + r * out;
        const double upper = i + 1 < n ? -r * b_[i] : 0.0;
        const double lower = i > 0 ? -r * a_[i - 1] : 0.0;
        const double denom = diag - lower * previous_c;
        inv_denominator_[i] = 1.0 / denom;
        c_prime_[i] = upper * inv_denominator_[i];
        lower_[i] = lower;
        previous_c = c_prime_[i];
      }
      cached_dt_ = dt;
    }
    double previous = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rho[i] = (rho[i] - lower_[i] * previous) * inv_denominator_[i];
      previous = rho[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) rho[i] -= c_prime_[i] * rho[i + 1];
  }

  double clipped = 0.0;
  for (double& v : rho) {
    if (!std::isfinite(v)) throw InstabilityDetected("Fokker-Planck step produced a non-finite cell");
    if (v < 0.0) {
      clipped -= v;
      v = 0.0;
    }
  }
  if (clipped * h_ >= kMassTolerance)
    throw InstabilityDetected("Fokker-Planck step produced negative mass " + std::to_string(clipped * h_));
  const double mass_after = compensated_sum(rho);
  const double drift = mass_before > 0.0 ? (mass_after - mass_before) / mass_before : 0.0;
  if (std::abs(drift) >= kMassTolerance)
    throw InstabilityDetected("Fokker-Planck step changed the mass by " + std::to_string(drift));
  if (mass_after > 0.0 && mass_after != mass_before) {
    const double scale = mass_before / mass_after;
    for (double& v : rho) v *= scale;
  }
  return drift;
}

double FpOperator::boundary_leakage(const std::vector<double>& rho) const {
  return left_escape_ * rho.front() + right_escape_ * rho.back();
}

GridDensity fp_step(const GridDensity& rho, const ItoSde& sde, double dt, TimeScheme scheme) {
  const FpOperator op(sde, rho.x_min, rho.x_max, rho.size());
  GridDensity out = rho;
  op.step(out.values, dt, scheme);
  return out;
}

FpResult evolve_to_equilibrium(const ItoSde& sde, const FpConfig& cfg, const std::optional<GridDensity>& rho0) {
  validate(cfg);
  FpResult result;
  if (rho0) {
    result.rho = *rho0;
    result.rho.normalize();
  } else {
    std::pair<double, double> domain;
    if (cfg.domain) {
      domain = *cfg.domain;
    } else {
      const auto scaled = domain_autoscale(sde, cfg);
      domain = {scaled.x_min, scaled.x_max};
    }
    const double half = 0.5 * (domain.second - domain.first);
    result.rho = GridDensity::gaussian(domain.first, domain.second, cfg.n, 0.5 * (domain.first + domain.second),
                                       half / cfg.W);
  }
  GridDensity& rho = result.rho;
  FpDiagnostics& diag = result.diagnostics;

  const FpOperator op(sde, rho.x_min, rho.x_max, rho.size());
  double dt = cfg.dt;
  if (cfg.scheme == TimeScheme::explicit_euler) dt = std::min(dt, 0.4 * op.explicit_positivity_bound());
  diag.dt = dt;

  std::vector<double> previous(rho.size());
  const double h = rho.h();
  double t = 0.0;
  while (t < cfg.T * (1.0 - 1e-12)) {
    const double step_dt = std::min(dt, cfg.T - t);
    previous = rho.values;
    diag.max_mass_error = std::max(diag.max_mass_error, std::abs(op.step(rho.values, step_dt, cfg.scheme)));
    t += step_dt;
    ++diag.steps;
    double change = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) change += std::abs(rho.values[i] - previous[i]);
    diag.stationarity_residual = change * h / step_dt;
    if (diag.stationarity_residual < cfg.eps_stat) {
      diag.equilibrated = true;
      break;
    }
  }
  diag.t = t;
  diag.boundary_leakage = op.boundary_leakage(rho.values);

  double raw = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double x = rho.x(i);
    const auto [f, g] = sde.evaluate(x);
    raw += rho.values[i] * (2.0 * x * f + g * g);
    scale += rho.values[i] * (std::abs(2.0 * x * f) + g * g);
  }
  diag.relation_residual = raw * h;
  diag.relation_residual_normalized = scale > 0.0 ? std::abs(raw) / scale : 0.0;
  return result;
}

MomentEstimates grid_moments(const GridDensity& rho, const std::vector<int>& orders) {
  MomentEstimates out;
  const double h = rho.h();
  const std::size_t n = rho.size();
  for (int k : orders) {
    if (k < 0) throw std::invalid_argument("grid_moments: negative order");
    std::vector<double> contributions(n);
    double total_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      contributions[i] = std::pow(rho.x(i), k) * rho.values[i] * h;
      total_abs += std::abs(contributions[i]);
    }
    out.moments[k] = compensated_sum(contributions);
    const double edge = std::abs(contributions.front()) + std::abs(contributions.back());
    out.tail_ratio[k] = total_abs > 0.0 ? edge / total_abs : 0.0;
  }
  return out;
}

AutoscaleResult domain_autoscale(const ItoSde& sde, const FpConfig& cfg) {
  validate(cfg);
  // Linearisation about 0: std G(0) / sqrt(2 |F'(0)|).
  const double eps = 1e-6;
  const double slope = (sde.drift(eps) - sde.drift(-eps)) / (2.0 * eps);
  const double g0 = sde.diffusion(0.0);
  double std = (slope < 0.0 && g0 > 0.0) ? g0 / std::sqrt(-2.0 * slope) : 1.0;
  const double initial_std = std;
  double centre = 0.0;

  FpConfig pilot = cfg;
  pilot.n = std::min(cfg.n, std::max<std::size_t>(64, cfg.pilot_n));
  pilot.T = std::min(cfg.T, cfg.pilot_T);

  AutoscaleResult result;
  for (int it = 1; it <= 5; ++it) {
    const double half = cfg.W * std;
    pilot.domain = std::pair{centre - half, centre + half};
    const auto rho0 = GridDensity::gaussian(centre - half, centre + half, pilot.n, centre, std);
    const auto run = evolve_to_equilibrium(sde, pilot, rho0);
    const auto m = grid_moments(run.rho, {1, 2});
    const double mean = m.moments.at(1);
    const double next = std::sqrt(std::max(0.0, m.moments.at(2) - mean * mean));
    result.iterations = it;
    if (!(next > 0.0) || !std::isfinite(next)) throw AutoscaleDiverged("pilot equilibrium has no positive spread");
    if (next > 10.0 * initial_std) {
      std::ostringstream os;
      os << "equilibrium std estimate grew from " << initial_std << " to " << next << "; pin the domain manually";
      throw AutoscaleDiverged(os.str());
    }
    const bool settled = std::abs(next - std) < 0.1 * std;
    std = next;
    centre = mean;
    if (settled) {
      result.converged = true;
      break;
    }
  }
  result.std = std;
  result.x_min = centre - cfg.W * std;
  result.x_max = centre + cfg.W * std;
  return result;
}

std::string density_csv(const GridDensity& rho) {
  std::ostringstream os;
  os.precision(17);
  os << "x,rho\n";
  for (std::size_t i = 0; i < rho.size(); ++i) os << rho.x(i) << ',' << rho.values[i] << '\n';
  return os.str();
}

std::string diagnostics_text(const FpDiagnostics& d) {
  std::ostringstream os;
  os.precision(17);
  os << "t = " << d.t << '\n'
     << "steps = " << d.steps << '\n'
     << "dt = " << d.dt << '\n'
     << "stationarity_residual = " << d.stationarity_residual << '\n'
     << "equilibrated = " << (d.equilibrated ? "true" : "false") << '\n'
     << "boundary_leakage = " << d.boundary_leakage << '\n'
     << "max_mass_error = " << d.max_mass_error << '\n'
     << "relation_residual = " << d.relation_residual << '\n'
     << "relation_residual_normalized = " << d.relation_residual_normalized << '\n';
  return os.str();
}

}  // namespace itolab
