// Acceptance run: one PASS/FAIL line per criterion, followed by its evidence.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "itolab/converter.hpp"
#include "itolab/euler_maruyama.hpp"
#include "itolab/fokker_planck.hpp"
#include "itolab/gaussian_moments.hpp"
#include "itolab/model_zoo.hpp"
#include "itolab/moment_relation.hpp"

using namespace itolab;

namespace {

int failures = 0;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int id, const char* title, bool ok, double elapsed, double budget, const std::string& detail) {
  const bool in_time = elapsed < budget;
  if (!(ok && in_time)) ++failures;
  std::printf("%s [%d] %s (%.2f s, budget %.0f s)\n", ok && in_time ? "PASS" : "FAIL", id, title, elapsed, budget);
  if (!in_time) std::printf("      runtime budget exceeded\n");
  std::printf("%s", detail.c_str());
  std::fflush(stdout);
}

std::string raw(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string fmt(const char* f, auto... args) { return "      " + raw(f, args...) + "\n"; }

ItoSde cubic(std::optional<Rational> sigma) {
  ModelParams p;
  p.exponent = 3;
  p.sigma = sigma;
  return convert_poly(model_zoo("power_attractor", p));
}

// -(s^2 + v^2) erf(v / (sqrt(2) s)) - sqrt(2/pi) v s exp(-v^2 / (2 s^2))
double drag_f2(double v, double s) {
  return -(s * s + v * v) * std::erf(v / (std::sqrt(2.0) * s)) -
         std::sqrt(2.0 / M_PI) * v * s * std::exp(-v * v / (2 * s * s));
}

double drag_g2_squared(double v, double s) {
  const double f = drag_f2(v, s);
  return std::pow(v, 4) + 6 * v * v * s * s + 3 * std::pow(s, 4) - f * f;
}

// (C / g^{2/3}) exp(-2|v|^3 / (3 g^2)) with C = 3^{7/6} Gamma(2/3) / (2^{5/3} pi)
double naive_law(double v, double g) {
  const double c = std::pow(3.0, 7.0 / 6.0) * std::tgamma(2.0 / 3.0) / (std::pow(2.0, 5.0 / 3.0) * M_PI);
  return c / std::pow(g, 2.0 / 3.0) * std::exp(-2 * std::pow(std::abs(v), 3) / (3 * g * g));
}

FpResult fp_autoscaled(const ItoSde& sde, FpConfig cfg) {
  const auto a = domain_autoscale(sde, cfg);
  cfg.domain = std::make_pair(a.x_min, a.x_max);
  return evolve_to_equilibrium(sde, cfg);
}

void criterion1() {
  Timer t;
  const Polynomial x = Polynomial::variable(Var::x), s = Polynomial::variable(Var::sigma);
  const ItoSde sde = cubic(std::nullopt);
  const Polynomial f = -x.pow(3) - Polynomial(3) * s.pow(2) * x;
  const Polynomial g2 = Polynomial(9) * s.pow(2) * x.pow(4) + Polynomial(36) * s.pow(4) * x.pow(2) +
                        Polynomial(15) * s.pow(6);
  const bool ok = sde.drift_polynomial() == f && sde.diffusion_squared_polynomial() == g2 &&
                  sde.drift_polynomial().to_string() == "-x^3 - 3*sigma^2*x" &&
                  sde.diffusion_squared_polynomial().to_string() == "9*sigma^2*x^4 + 36*sigma^4*x^2 + 15*sigma^6";
  report(1, "symbolic conversion of power_attractor(3, sigma)", ok, t.seconds(), 1,
         fmt("F   = %s", sde.drift_polynomial().to_string().c_str()) +
             fmt("G^2 = %s", sde.diffusion_squared_polynomial().to_string().c_str()));
}

void criterion2() {
  Timer t;
  const double sigma = 0.2;
  ModelParams p;
  p.sigma = Rational(1, 5);
  const std::vector<double> probes{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  const ItoSde sde = convert_blackbox(model_zoo("drag", p), probes);
  double ef = 0.0, eg = 0.0, eg_plus = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double v = -2.0 + 0.01 * i;
    const auto [f, g] = sde.evaluate(v);
    ef = std::max(ef, std::abs(f - drag_f2(v, sigma)));
    eg = std::max(eg, std::abs(g - std::sqrt(drag_g2_squared(v, sigma))));
    const double plus = std::pow(v, 4) + 6 * v * v * sigma * sigma + 3 * std::pow(sigma, 4) + 3 * std::pow(drag_f2(v, sigma), 2);
    eg_plus = std::max(eg_plus, std::abs(g - std::sqrt(plus)));
  }
  report(2, "black-box drag conversion vs closed form, sigma = 0.2, v in [-2, 2]", ef <= 1e-8 && eg <= 1e-8,
         t.seconds(), 1,
         fmt("max |F - F2| = %.3e, max |G - G2| = %.3e (tolerance 1e-8)", ef, eg) +
             fmt("G2 with +3 F2^2 under the root would be off by up to %.3e", eg_plus));
}

void criterion3() {
  Timer t;
  std::string detail;
  bool ok = true;
  ModelParams p;
  p.sigma = Rational(1, 5);
  struct Case {
    const char* name;
    ItoSde sde;
    double g;
  };
  const Case cases[] = {
      {"amplitude g = sigma", ItoSde::from_functions([](double v) { return -v * std::abs(v); }, [](double) { return 0.2; }), 0.2},
      {"amplitude g = sigma^2 (naive_convert)", naive_convert(model_zoo("drag", p)), 0.04},
  };
  for (const auto& c : cases) {
    FpConfig cfg;
    cfg.n = 4096;
    cfg.W = 10;
    cfg.dt = 0.05;
    cfg.T = 2000;
    const auto r = fp_autoscaled(c.sde, cfg);
    double l1 = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < r.rho.size(); ++i) {
      l1 += std::abs(r.rho.values[i] - naive_law(r.rho.x(i), c.g)) * r.rho.h();
      mass += naive_law(r.rho.x(i), c.g) * r.rho.h();
    }
    ok = ok && l1 <= 5e-3 && r.diagnostics.equilibrated;
    detail += fmt("%s: L1 = %.3e (tolerance 5e-3), domain +-%.3f, equilibrated %s at t = %.1f, law mass on grid %.9f",
                  c.name, l1, r.rho.x_max, r.diagnostics.equilibrated ? "yes" : "NO", r.diagnostics.t, mass);
  }
  report(3, "naive drag Fokker-Planck equilibrium vs exact law, n = 4096", ok, t.seconds(), 30, detail);
}

void criterion4() {
  Timer t;
  const double sigma = 0.2;
  ModelParams p;
  p.sigma = Rational(1, 5);
  const std::vector<double> probes{-2.0, -1.0, 0.0, 1.0, 2.0};
  const ItoSde converted = convert_blackbox(model_zoo("drag", p), probes);
  FpConfig cfg;
  cfg.n = 4096;
  cfg.domain = std::make_pair(-3.0, 3.0);
  cfg.dt = 0.05;
  cfg.T = 2000;
  const auto r = evolve_to_equilibrium(converted, cfg);
  double min_log_diff = INFINITY, max_ratio_12 = 0.0, at_min = 0.0;
  for (std::size_t i = 0; i < r.rho.size(); ++i) {
    const double v = r.rho.x(i);
    if (std::abs(v) < 1.0) continue;
    const double d = std::log(r.rho.values[i]) - std::log(naive_law(v, sigma));
    if (d < min_log_diff) {
      min_log_diff = d;
      at_min = v;
    }
    if (std::abs(v) <= 2.0) max_ratio_12 = std::max(max_ratio_12, std::exp(d));
  }
  const bool ok = min_log_diff > 0.0 && max_ratio_12 >= 10.0 && r.diagnostics.equilibrated;
  report(4, "converted drag has heavier tails than the naive law, sigma = 0.2", ok, t.seconds(), 60,
         fmt("min over |v| >= 1 of log rho_converted - log rho_naive = %.3f (at v = %.3f)", min_log_diff, at_min) +
             fmt("max density ratio on 1 <= |v| <= 2: %.3e (need >= 10)", max_ratio_12) +
             fmt("converted density at v = 0: %.5f, naive C / sigma^(2/3) = %.5f", r.rho.values[r.rho.size() / 2],
                 naive_law(0.0, sigma)) +
             fmt("equilibrated %s at t = %.1f", r.diagnostics.equilibrated ? "yes" : "NO", r.diagnostics.t));
}

void criterion5() {
  Timer t;
  ModelParams p;  // a = b = 1
  const ItoSde ou = convert_poly(model_zoo("ou", p));
  EmConfig em;
  em.n_paths = 100000;
  em.dt = 1e-3;
  em.t_final = 50;
  em.seed = 20240501;
  const auto s = run_ensemble(ou, em);
  const auto& m2 = s.moment(2);
  const double z = std::abs(m2.value - 0.5) / m2.standard_error;
  FpConfig cfg;
  cfg.n = 4096;
  const auto r = fp_autoscaled(ou, cfg);
  const double fp_mu2 = grid_moments(r.rho, {2}).moments.at(2);
  const bool ok = z <= 3.0 && std::abs(fp_mu2 - 0.5) <= 1e-3;
  report(5, "Ornstein-Uhlenbeck stationary variance b^2/(2a) = 0.5", ok, t.seconds(), 60,
         fmt("EM: mu2 = %.6f +- %.6f, |z| = %.2f (need <= 3), %zu paths, %zu steps", m2.value, m2.standard_error, z,
             s.n_paths, s.n_steps) +
             fmt("FP: mu2 = %.8f, |error| = %.2e (need <= 1e-3)", fp_mu2, std::abs(fp_mu2 - 0.5)));
}

void criterion6() {
  Timer t;
  bool ok = true;
  std::string detail;
  const auto rel = leading_order_relation(cubic(std::nullopt), 1);
  struct Case {
    double sigma;
    Rational exact;
    double T;
    double dt;
  };
  for (const Case& c : {Case{0.1, Rational(1, 10), 1000, 0.05}, Case{0.2, Rational(1, 5), 1000, 0.05},
                        Case{0.3, Rational(3, 10), 200, 0.05}}) {
    FpConfig cfg;
    cfg.W = 64;
    cfg.T = c.T;
    cfg.dt = c.dt;
    const auto r = fp_autoscaled(cubic(c.exact), cfg);
    MomentSequence m;
    m.values = grid_moments(r.rho, {2, 4}).moments;
    const auto bound = rel.substitute(Var::sigma, c.exact);
    const double nr = normalized_residual(bound, m);
    ok = ok && nr <= 1e-2 && r.diagnostics.equilibrated;
    detail += fmt("sigma = %.1f: mu2 = %.6e, mu4 = %.6e, residual = %.3e, normalized = %.3e (need <= 1e-2), "
                  "equilibrated %s",
                  c.sigma, m.at(2), m.at(4), relation_residual(bound, m), nr, r.diagnostics.equilibrated ? "yes" : "NO");
  }
  report(6, "FP equilibrium moments satisfy 0 = 15s^6 + 6s^2(6s^2-1)mu2 + (9s^2-2)mu4", ok, t.seconds(), 120,
         fmt("%s", rel.to_string().c_str()) + detail);
}

void criterion7() {
  Timer t;
  const double sigma = 0.05;
  FpConfig cfg;
  cfg.W = 64;
  cfg.T = 5000;
  cfg.dt = 0.5;
  const auto r = fp_autoscaled(cubic(Rational(1, 20)), cfg);
  const auto m = grid_moments(r.rho, {2, 4}).moments;
  const auto closure = gaussian_closure_solve(cubic(std::nullopt), sigma);
  const double rel_err = std::abs(m.at(2) - closure.mu2) / closure.mu2;
  const double kurt = m.at(4) / (3 * m.at(2) * m.at(2));
  const bool ok = closure.status == ClosureStatus::ok && rel_err <= 0.05 && kurt >= 0.95 && kurt <= 1.05 &&
                  r.diagnostics.equilibrated;
  report(7, "Gaussian closure regime, sigma = 0.05", ok, t.seconds(), 120,
         fmt("FP mu2 = %.6e, closure mu2 = %.6e, relative difference %.2e (need <= 0.05)", m.at(2), closure.mu2,
             rel_err) +
             fmt("mu4 / (3 mu2^2) = %.4f (need within [0.95, 1.05]); mu2 / sigma^2 = %.4f", kurt,
                 m.at(2) / (sigma * sigma)) +
             fmt("equilibrated %s at t = %.1f", r.diagnostics.equilibrated ? "yes" : "NO", r.diagnostics.t));
}

void criterion8() {
  Timer t;
  const auto rel = leading_order_relation(cubic(std::nullopt), 1);
  const Rational crit(2, 9), eps(1, mpz_class("1000000000000"));
  const auto below = divergence_classifier(rel.substitute_sigma_squared(crit - eps));
  const auto at = divergence_classifier(rel.substitute_sigma_squared(crit));
  const auto above = divergence_classifier(rel.substitute_sigma_squared(crit + eps));
  const bool flip = below == DivergenceClass::indeterminate && at == DivergenceClass::all_positive &&
                    above == DivergenceClass::all_positive;
  std::string detail = fmt("classifier at sigma^2 = 2/9 - 1e-12: %s, 2/9: %s, 2/9 + 1e-12: %s", to_string(below),
                           to_string(at), to_string(above));

  bool grows = true;
  double previous = 0.0;
  for (double W : {8.0, 16.0, 32.0}) {
    FpConfig cfg;
    cfg.W = W;
    cfg.T = 100;
    cfg.dt = 0.01;
    cfg.eps_stat = 0.0;  // run the full horizon
    const auto r = fp_autoscaled(cubic(Rational(1, 2)), cfg);
    const auto m = grid_moments(r.rho, {2, 4});
    const double ratio = previous > 0 ? m.moments.at(4) / previous : 0.0;
    if (previous > 0 && ratio < 1.2) grows = false;
    detail += fmt("W = %2.0f: half-width %.3f, mu2 = %.5f, mu4 = %.5f, ratio to previous W %s", W, r.rho.x_max,
                  m.moments.at(2), m.moments.at(4), previous > 0 ? raw("%.3f (need >= 1.2)", ratio).c_str() : "-");
    previous = m.moments.at(4);
  }
  report(8, "criticality: exact flip at sigma^2 = 2/9 and mu4 growth with W at sigma = 0.5, T = 100", flip && grows,
         t.seconds(), 300, detail);
}

void criterion9() {
  Timer t;
  ModelParams p;
  p.sigma = Rational(3, 20);
  const NoiseExpansion rate = model_zoo("power_attractor", p);
  const ItoSde sde = convert_poly(rate);
  const std::vector<double> dts{1e-2, 1e-3, 1e-4};
  EmConfig cfg;
  cfg.n_paths = 20000;
  cfg.t_final = 10;
  cfg.seed = 9001;
  const auto table = timestep_independence_probe(sde, cfg, dts);
  std::string detail;
  for (const auto& row : table.rows)
    detail += fmt("converted EM dt = %.0e: mu2 = %.4e +- %.1e, mu4 = %.4e +- %.1e", row.dt,
                  row.summary.moment(2).value, row.summary.moment(2).standard_error, row.summary.moment(4).value,
                  row.summary.moment(4).standard_error);
  detail += fmt("max pairwise z: mu2 %.2f, mu4 %.2f (need <= 3)", table.max_z_mu2(), table.max_z_mu4());
  const bool agree = table.max_z_mu2() <= 3.0 && table.max_z_mu4() <= 3.0;

  EmConfig direct = cfg;
  direct.n_paths = 5000;
  const auto dtable = direct_langevin_probe(rate, direct, dts);
  bool shrinking = true;
  for (std::size_t i = 0; i < dtable.rows.size(); ++i) {
    const auto& m2 = dtable.rows[i].summary.moment(2);
    detail += fmt("direct dt = %.0e: mu2 = %.4e +- %.1e", dtable.rows[i].dt, m2.value, m2.standard_error);
    if (i > 0) {
      const auto& prev = dtable.rows[i - 1].summary.moment(2);
      // decrease must be resolved beyond noise
      if (!(prev.value - m2.value > 3.0 * std::hypot(prev.standard_error, m2.standard_error))) shrinking = false;
    }
  }
  report(9, "converted EM is dt-independent, direct simulation collapses as dt -> 0 (sigma = 0.15)",
         agree && shrinking, t.seconds(), 120, detail);
}

void criterion10() {
  Timer t;
  std::string detail;

  // mass conservation at every step
  double worst_mass = 0.0;
  {
    const ItoSde sde = cubic(Rational(3, 10));
    for (auto scheme : {TimeScheme::implicit, TimeScheme::explicit_euler}) {
      FpOperator op(sde, -3, 3, 2048);
      std::vector<double> rho = GridDensity::gaussian(-3, 3, 2048, 0.5, 0.3).values;
      const double dt = scheme == TimeScheme::implicit ? 0.01 : 0.9 * op.explicit_positivity_bound();
      for (int s = 0; s < 2000; ++s) {
        op.step(rho, dt, scheme);
        long double m = 0;
        for (double r : rho) m += r;
        worst_mass = std::max(worst_mass, std::abs(static_cast<double>(m * op.h()) - 1.0));
      }
    }
  }
  const bool mass_ok = worst_mass < 1e-12;
  detail += fmt("max |sum rho h - 1| over 4000 steps = %.2e (need < 1e-12)", worst_mass);

  // second-order grid convergence against exp(-x^4 / (2 s^2)) / Z
  std::vector<double> ratios;
  {
    const double s = 0.5;
    const double z = 2.0 * std::tgamma(1.25) * std::pow(2.0 * s * s, 0.25);
    ModelParams p;
    p.sigma = Rational(1, 2);
    const ItoSde sde = convert_poly(model_zoo("additive_cubic", p));
    double previous = 0.0;
    for (std::size_t n : {128u, 256u, 512u, 1024u}) {
      FpConfig cfg;
      cfg.n = n;
      cfg.domain = std::make_pair(-2.0, 2.0);
      cfg.dt = 0.05;
      cfg.T = 1000;
      cfg.eps_stat = 1e-12;
      const auto r = evolve_to_equilibrium(sde, cfg);
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = r.rho.x(i);
        err += std::abs(r.rho.values[i] - std::exp(-std::pow(x, 4) / (2 * s * s)) / z) * r.rho.h();
      }
      detail += fmt("n = %4zu: L1 error %.3e%s", n, err, previous > 0 ? raw(", ratio %.3f", previous / err).c_str() : "");
      if (previous > 0) ratios.push_back(previous / err);
      previous = err;
    }
  }
  const bool order_ok = std::all_of(ratios.begin(), ratios.end(), [](double r) { return r >= 3.0 && r <= 5.0; });

  // (2k - 1)!! in exact arithmetic
  bool df_ok = true;
  {
    mpz_class df = 1;
    for (unsigned k = 1; k <= 30; ++k) {
      df *= 2 * k - 1;
      df_ok = df_ok && standard_normal_moment(2 * k) == Rational(df) &&
              gaussian_raw_moment_exact(2 * k, 0, 1) == Rational(df) && standard_normal_moment(2 * k - 1) == 0;
    }
  }
  detail += fmt("E[eta^2k] = (2k-1)!! exactly for k = 1..30: %s", df_ok ? "yes" : "NO");

  // polynomial route vs quadrature route
  double route = 0.0;
  for (int n = 1; n <= 5; ++n) {
    for (const Rational& sigma : {Rational(1, 10), Rational(3, 10), Rational(1, 2)}) {
      ModelParams p;
      p.exponent = n;
      p.sigma = sigma;
      const NoiseExpansion rate = model_zoo("power_attractor", p);
      const ItoSde exact = convert_poly(rate);
      const std::vector<double> probes{-2.0, -1.0, 0.0, 1.0, 2.0};
      const ItoSde numeric = convert_blackbox(rate, probes);
      for (int i = 0; i < 32; ++i) {
        const double x = -2.0 + 4.0 * i / 31.0;
        route = std::max({route, std::abs(exact.drift(x) - numeric.drift(x)),
                          std::abs(exact.diffusion(x) - numeric.diffusion(x))});
      }
    }
  }
  const bool route_ok = route <= 1e-9;
  detail += fmt("max |poly - quadrature| over F, G = %.2e (need <= 1e-9)", route);

  report(10, "property suites: mass, grid order, double factorial, route equivalence",
         mass_ok && order_ok && df_ok && route_ok, t.seconds(), 60, detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
