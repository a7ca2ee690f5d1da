#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "cli_support.hpp"
#include "itolab/converter.hpp"
#include "itolab/error.hpp"
#include "itolab/euler_maruyama.hpp"
#include "itolab/fokker_planck.hpp"
#include "itolab/io.hpp"
#include "itolab/model_zoo.hpp"
#include "itolab/moment_relation.hpp"
#include "itolab/parallel.hpp"

namespace itolab::cli {

namespace fs = std::filesystem;

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

// Quadrature order for black-box rates is settled at these points.
std::vector<double> default_probes(const std::optional<std::pair<double, double>>& domain) {
  return domain ? linspace(domain->first, domain->second, 9) : linspace(-2.0, 2.0, 9);
}

ItoSde to_sde(const NoiseExpansion& rate, bool naive, const std::vector<double>& probes) {
  if (naive) return naive_convert(rate);
  if (rate.is_polynomial()) return convert_poly(rate);
  return convert_blackbox(rate, probes);
}

TimeScheme parse_scheme(const std::string& s) {
  if (s == "implicit") return TimeScheme::implicit;
  if (s == "explicit") return TimeScheme::explicit_euler;
  throw std::invalid_argument("scheme must be implicit or explicit, got '" + s + "'");
}

std::string log_or_inf(double rho) { return rho > 0 ? num(std::log(rho)) : "-inf"; }

void emit(const std::string& out, const std::string& file, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
  } else {
    write_file_atomic(fs::path(out) / file, content);
  }
}

void print_moments(const EnsembleSummary& s) {
  std::printf("paths %zu, steps %zu, t = %g, non-finite %zu (%.3g%%)\n", s.n_paths, s.n_steps, s.final_time,
              s.n_nonfinite, 100.0 * s.nonfinite_fraction());
  for (const auto& [order, m] : s.raw_moments)
    std::printf("mu%d = %.8g +- %.3g\n", order, m.value, m.standard_error);
}

// Moments of exp(-x^4 / c): mu_2j = c^{j/2} Gamma((2j + 1)/4) / Gamma(1/4).
double quartic_moment(int order, double c) {
  return std::pow(c, order / 4.0) * std::tgamma((order + 1) / 4.0) / std::tgamma(0.25);
}

class Convert : public Command {
 public:
  explicit Convert(CLI::App& root) {
    app = root.add_subcommand("convert", "Print the equivalent Ito SDE (exact forms, or an x,F,G table)");
    settings_ = Settings(app);
    add_common(app, settings_, common_, true, false);
    settings_.add("grid", grid_, "Tabulate F and G on lo:hi:n (default for black-box rates: -2:2:401)");
    settings_.add("quadrature", quadrature_, "Black-box quadrature: auto, gauss-hermite or gauss-kronrod");
    settings_.flag("naive", naive_, "Use the naive reading: drift R(x, 0), constant noise");
  }

  int run() override {
    const ModelSpec spec = resolve(*app, settings_, common_, true);
    const NoiseExpansion rate = build_model(spec);
    BlackBoxOptions options;
    if (quadrature_ == "gauss-hermite") {
      options.method = QuadratureMethod::gauss_hermite;
    } else if (quadrature_ == "gauss-kronrod") {
      options.method = QuadratureMethod::gauss_kronrod;
    } else if (quadrature_ != "auto") {
      throw std::invalid_argument("unknown quadrature '" + quadrature_ + "'");
    }

    std::string extra;
    ItoSde sde = ItoSde::from_functions([](double) { return 0.0; }, [](double) { return 0.0; });
    if (naive_) {
      sde = naive_convert(rate);
    } else if (rate.is_polynomial()) {
      sde = convert_poly(rate);
    } else {
      const auto probes = grid_.empty() ? default_probes(std::nullopt) : parse_grid(grid_);
      const auto plan = plan_blackbox_quadrature(rate, probes, options);
      extra = plan.method == QuadratureMethod::gauss_hermite
                  ? "info.quadrature = gauss-hermite order " + std::to_string(plan.gauss_hermite_order) + "\n"
                  : "info.quadrature = gauss-kronrod\n";
      sde = convert_blackbox(rate, probes, options);
    }

    if (!common_.out.empty()) write_manifest(common_.out, "convert", &spec, settings_, extra);
    if (sde.has_polynomial_forms() && grid_.empty()) {
      std::string text = "F   = " + sde.drift_polynomial().to_string() + "\n";
      const Polynomial& g2 = sde.diffusion_squared_polynomial();
      text += "G^2 = " + g2.to_string() + "\n";
      if (g2.is_constant()) {
        const Rational c = g2.constant_value();
        if (c >= 0 && mpz_perfect_square_p(c.get_num().get_mpz_t()) && mpz_perfect_square_p(c.get_den().get_mpz_t())) {
          const Rational g(mpz_class(sqrt(c.get_num())), mpz_class(sqrt(c.get_den())));
          text += "G   = " + to_string(g) + "\n";
        }
      }
      emit(common_.out, "sde.txt", text);
      return 0;
    }
    std::string csv = "x,F,G\n";
    for (double x : parse_grid(grid_.empty() ? "-2:2:401" : grid_)) {
      const auto [f, g] = sde.evaluate(x);
      csv += num(x) + "," + num(f) + "," + num(g) + "\n";
    }
    emit(common_.out, "sde.csv", csv);
    return 0;
  }

 private:
  Settings settings_{nullptr};
  Common common_;
  std::string grid_;
  std::string quadrature_ = "auto";
  bool naive_ = false;
};

class Simulate : public Command {
 public:
  explicit Simulate(CLI::App& root) {
    app = root.add_subcommand("simulate", "Euler-Maruyama ensemble of the converted (or direct) dynamics");
    settings_ = Settings(app);
    add_common(app, settings_, common_, true, false);
    settings_.add("dt", cfg_.dt, "Time step");
    settings_.add("T", cfg_.t_final, "Final time");
    settings_.add("paths", cfg_.n_paths, "Number of paths");
    settings_.add("x0", x0_, "Initial condition: 0.5, normal:m,s or uniform:lo,hi");
    settings_.add("seed", cfg_.seed, "Root seed; path p uses an independent keyed stream");
    settings_.flag("record", cfg_.record, "Record the ensemble time series (series.csv)");
    settings_.add("stride", cfg_.record_stride, "Steps between recorded points");
    settings_.add("bins", cfg_.histogram_bins, "Histogram bins");
    settings_.flag("direct-langevin", direct_, "Draw eta once per step in R(x, eta) instead of converting");
    settings_.flag("naive", naive_, "Simulate the naive reading: drift R(x, 0), constant noise");
    settings_.add("dt-list", dt_list_, "Run once per dt (comma separated) and compare moments")->delimiter(',');
  }

  int run() override {
    const ModelSpec spec = resolve(*app, settings_, common_, true);
    const NoiseExpansion rate = build_model(spec);
    cfg_.x0 = parse_initial_condition(x0_);
    cfg_.workers = common_.workers;
    validate(cfg_);
    const bool to_disk = !common_.out.empty();
    if (to_disk) write_manifest(common_.out, "simulate", &spec, settings_);
    const auto sde = [&] { return to_sde(rate, naive_, default_probes(std::nullopt)); };

    if (!dt_list_.empty()) {
      const ProbeTable table =
          direct_ ? direct_langevin_probe(rate, cfg_, dt_list_) : timestep_independence_probe(sde(), cfg_, dt_list_);
      std::string csv = "dt,seed,mu2,mu2_se,mu4,mu4_se,nonfinite_fraction\n";
      for (const auto& row : table.rows) {
        const auto& m2 = row.summary.moment(2);
        const auto& m4 = row.summary.moment(4);
        csv += num(row.dt) + "," + std::to_string(row.seed) + "," + num(m2.value) + "," + num(m2.standard_error) + "," +
               num(m4.value) + "," + num(m4.standard_error) + "," + num(row.summary.nonfinite_fraction()) + "\n";
        std::printf("dt = %-8g mu2 = %.6e +- %.2e   mu4 = %.6e +- %.2e\n", row.dt, m2.value, m2.standard_error,
                    m4.value, m4.standard_error);
      }
      std::printf("max pairwise z: mu2 %.3g, mu4 %.3g\n", table.max_z_mu2(), table.max_z_mu4());
      if (to_disk) write_file_atomic(fs::path(common_.out) / "probe.csv", csv);
      return 0;
    }

    const EnsembleSummary s = direct_ ? run_direct_langevin(rate, cfg_) : run_ensemble(sde(), cfg_);
    print_moments(s);
    if (to_disk) {
      const fs::path dir(common_.out);
      write_file_atomic(dir / "summary.csv", summary_csv(s));
      write_file_atomic(dir / "histogram.csv", histogram_csv(s.histogram));
      if (cfg_.record) write_file_atomic(dir / "series.csv", series_csv(s));
    }
    return 0;
  }

 private:
  Settings settings_{nullptr};
  Common common_;
  EmConfig cfg_;
  std::string x0_ = "0";
  bool direct_ = false;
  bool naive_ = false;
  std::vector<double> dt_list_;
};

// Options shared by the Fokker-Planck driven commands.
struct FpOptions {
  FpConfig cfg;
  std::string scheme = "implicit";
  std::string domain;

  void add(Settings& settings, bool with_domain) {
    settings.add("W", cfg.W, "Domain half-width in equilibrium standard deviations (autoscale)");
    settings.add("cells", cfg.n, "Grid cells");
    settings.add("dt", cfg.dt, "Time step");
    settings.add("T", cfg.T, "Horizon");
    settings.add("eps", cfg.eps_stat, "Stationarity tolerance on ||rho' - rho||_1 / dt (0: run to T)");
    settings.add("scheme", scheme, "implicit or explicit");
    settings.add("pilot-T", cfg.pilot_T, "Horizon of each autoscale pilot run");
    settings.add("pilot-cells", cfg.pilot_n, "Cells of the autoscale pilot runs");
    if (with_domain) settings.add("domain", domain, "Fixed domain lo:hi (default: autoscale with W)");
  }

  FpConfig resolved() const {
    FpConfig c = cfg;
    c.scheme = parse_scheme(scheme);
    if (!domain.empty()) c.domain = parse_interval(domain);
    validate(c);
    return c;
  }
};

// Fills cfg.domain from the autoscale pilots when it is unset.
FpResult evolve(const ItoSde& sde, FpConfig cfg) {
  if (!cfg.domain) {
    const auto a = domain_autoscale(sde, cfg);
    cfg.domain = std::make_pair(a.x_min, a.x_max);
  }
  return evolve_to_equilibrium(sde, cfg);
}

class Fp : public Command {
 public:
  explicit Fp(CLI::App& root) {
    app = root.add_subcommand("fp", "Fokker-Planck evolution to equilibrium");
    settings_ = Settings(app);
    add_common(app, settings_, common_, true, false);
    fp_.add(settings_, true);
    settings_.flag("naive", naive_, "Evolve the naive reading: drift R(x, 0), constant noise");
  }

  int run() override {
    const ModelSpec spec = resolve(*app, settings_, common_, true);
    const FpConfig cfg = fp_.resolved();
    const ItoSde sde = to_sde(build_model(spec), naive_, default_probes(cfg.domain));
    const FpResult r = evolve(sde, cfg);
    const auto m = grid_moments(r.rho, {1, 2, 3, 4, 5, 6});

    std::printf("domain [%.6g, %.6g], %zu cells\n", r.rho.x_min, r.rho.x_max, r.rho.size());
    std::printf("%s", diagnostics_text(r.diagnostics).c_str());
    std::string csv = "order,value,tail_ratio\n";
    for (const auto& [order, value] : m.moments) {
      std::printf("mu%d = %.10g (tail ratio %.2g)\n", order, value, m.tail_ratio.at(order));
      csv += std::to_string(order) + "," + num(value) + "," + num(m.tail_ratio.at(order)) + "\n";
    }
    if (!r.diagnostics.equilibrated) std::printf("NotEquilibrated: horizon reached before stationarity\n");
    if (!common_.out.empty()) {
      const std::string extra = "info.x_min = " + num(r.rho.x_min) + "\ninfo.x_max = " + num(r.rho.x_max) + "\n";
      write_manifest(common_.out, "fp", &spec, settings_, extra);
      const fs::path dir(common_.out);
      write_file_atomic(dir / "density.csv", density_csv(r.rho));
      write_file_atomic(dir / "moments.csv", csv);
      write_file_atomic(dir / "diagnostics.txt", diagnostics_text(r.diagnostics));
    }
    return 0;
  }

 private:
  Settings settings_{nullptr};
  Common common_;
  FpOptions fp_;
  bool naive_ = false;
};

class Moments : public Command {
 public:
  explicit Moments(CLI::App& root) {
    app = root.add_subcommand("moments", "Equilibrium moment relations, Gaussian closure and divergence test");
    settings_ = Settings(app);
    add_common(app, settings_, common_, true, false);
    settings_.add("relation", relation_, "Relation for E[x^2k]: k=N");
    settings_.add("exact-dt", exact_dt_, "Also print the finite-step relation: a dt value or 'sym'");
  }

  int run() override {
    const ModelSpec spec = resolve(*app, settings_, common_, true);
    std::string ktext = relation_.rfind("k=", 0) == 0 ? relation_.substr(2) : relation_;
    const Rational kq = parse_rational(ktext);
    if (kq.get_den() != 1 || kq < 1 || kq > 64) throw std::invalid_argument("--relation needs k=N with N >= 1");
    const int k = static_cast<int>(kq.get_num().get_si());

    const ItoSde sde = convert_poly(build_model(spec));
    const MomentRelation rel = leading_order_relation(sde, k);
    std::string text = rel.to_string() + "\n";
    if (!exact_dt_.empty()) {
      const auto dt = exact_dt_ == "sym" ? std::optional<Rational>() : std::optional<Rational>(parse_rational(exact_dt_));
      text += "finite dt: " + exact_relation_in_dt(sde, k, dt).to_string() + "\n";
    }
    if (rel.is_numeric()) {
      text += std::string("divergence: ") + to_string(divergence_classifier(rel)) + "\n";
      if (k == 1 && spec.params.sigma) {
        const auto c = gaussian_closure_solve(sde, to_double(*spec.params.sigma));
        text += std::string("gaussian closure: ") + to_string(c.status);
        if (c.status == ClosureStatus::ok)
          text += ", mu2 = " + num(c.mu2) + (c.in_validity_domain ? " (mu2 < 0.1 sigma^2)" : " (outside mu2 < 0.1 sigma^2)");
        text += "\n";
      }
    }
    if (!common_.out.empty()) write_manifest(common_.out, "moments", &spec, settings_);
    emit(common_.out, "relation.txt", text);
    return 0;
  }

 private:
  Settings settings_{nullptr};
  Common common_;
  std::string relation_ = "k=1";
  std::string exact_dt_;
};

class Fig1 : public Command {
 public:
  explicit Fig1(CLI::App& root) {
    app = root.add_subcommand("fig1", "Drag model: converted equilibrium against the naive exact law");
    settings_ = Settings(app);
    add_common(app, settings_, common_, false, true);
    settings_.add("sigma", sigma_, "Noise amplitude");
    settings_.add("cells", cfg_.n, "Grid cells");
    settings_.add("domain", domain_, "Shared grid lo:hi");
    settings_.add("dt", cfg_.dt, "Time step");
    settings_.add("T", cfg_.T, "Horizon");
    settings_.add("eps", cfg_.eps_stat, "Stationarity tolerance");
    settings_.add("naive-amplitude", amplitude_, "Noise amplitude of the naive law: sigma or sigma2");
  }

  int run() override {
    resolve(*app, settings_, common_, false);
    ModelParams p;
    p.sigma = parse_rational(sigma_);
    if (*p.sigma <= 0) throw std::invalid_argument("sigma must be positive");
    const double sigma = to_double(*p.sigma);
    if (amplitude_ != "sigma" && amplitude_ != "sigma2")
      throw std::invalid_argument("naive-amplitude must be sigma or sigma2");
    const double g = amplitude_ == "sigma" ? sigma : sigma * sigma;
    cfg_.domain = parse_interval(domain_);
    validate(cfg_);

    const ItoSde sde = convert_blackbox(model_zoo("drag", p), default_probes(cfg_.domain));
    const FpResult r = evolve_to_equilibrium(sde, cfg_);
    std::string conv = "v,rho,log_rho\n", naive = "v,rho,log_rho\n";
    double naive_mass = 0.0;
    std::size_t crossover = r.rho.size() / 2;  // first cell of the outer region where rho_converted > rho_naive
    for (std::size_t i = 0; i < r.rho.size(); ++i) {
      const double v = r.rho.x(i), rc = r.rho.values[i], rn = naive_drag_stationary_density(v, g);
      naive_mass += rn * r.rho.h();
      conv += num(v) + "," + num(rc) + "," + log_or_inf(rc) + "\n";
      naive += num(v) + "," + num(rn) + "," + log_or_inf(rn) + "\n";
    }
    for (std::size_t i = r.rho.size() / 2; i < r.rho.size(); ++i)
      if (!(r.rho.values[i] > naive_drag_stationary_density(r.rho.x(i), g))) crossover = i + 1;

    write_manifest(common_.out, "fig1", nullptr, settings_);
    const fs::path dir(common_.out);
    write_file_atomic(dir / "fig1_converted.csv", conv);
    write_file_atomic(dir / "fig1_naive.csv", naive);
    std::printf("converted: mass %.12f, rho(0) = %.6g, %s at t = %g\n", r.rho.mass(),
                r.rho.values[r.rho.size() / 2], r.diagnostics.equilibrated ? "equilibrated" : "NotEquilibrated",
                r.diagnostics.t);
    std::printf("naive (amplitude %g): mass on grid %.12f, rho(0) = %.6g\n", g, naive_mass,
                naive_drag_stationary_density(0.0, g));
    if (crossover < r.rho.size())
      std::printf("converted density exceeds the naive law for all |v| >= %.4g\n", r.rho.x(crossover));
    return 0;
  }

 private:
  Settings settings_{nullptr};
  Common common_;
  FpConfig cfg_ = [] {
    FpConfig c;
    c.dt = 0.05;
    c.T = 2000;
    return c;
  }();
  std::string sigma_ = "0.2";
  std::string domain_ = "-3:3";
  std::string amplitude_ = "sigma";
};

class Fig2 : public Command {
 public:
  explicit Fig2(CLI::App& root) {
    app = root.add_subcommand("fig2", "Cubic attractor: FP moments over (sigma, T, W) with the Gaussian closure");
    settings_ = Settings(app);
    add_common(app, settings_, common_, false, true);
    settings_.add("sigmas", sigmas_, "Sigma values: lo:hi:step or a comma list");
    settings_.add("T-list", t_list_, "Horizons (comma separated)")->delimiter(',');
    settings_.add("W-list", w_list_, "Domain widths in standard deviations (comma separated)")->delimiter(',');
    settings_.add("cells", cfg_.n, "Grid cells");
    settings_.add("dt", cfg_.dt, "Time step");
    settings_.add("eps", cfg_.eps_stat, "Stationarity tolerance");
    settings_.add("pilot-T", cfg_.pilot_T, "Horizon of each autoscale pilot run");
  }

  int run() override {
    resolve(*app, settings_, common_, false);
    const auto sigmas = parse_rational_list(sigmas_);
    if (t_list_.empty() || w_list_.empty()) throw std::invalid_argument("T-list and W-list must be nonempty");
    validate(cfg_);
    write_manifest(common_.out, "fig2", nullptr, settings_);

    ModelParams p;
    const ItoSde symbolic = convert_poly(model_zoo("power_attractor", p));
    const MomentRelation rel = leading_order_relation(symbolic, 1);
    struct Point {
      Rational sigma;
      double T;
      double W;
    };
    std::vector<Point> points;
    for (const auto& s : sigmas)
      for (double T : t_list_)
        for (double W : w_list_) points.push_back({s, T, W});

    const fs::path dir(common_.out);
    fs::create_directories(dir / "points");
    const std::string header =
        "sigma,T,W,status,half_width,mu2,mu4,kurtosis_ratio,closure_mu2,closure_status,closure_valid,naive_mu2,"
        "naive_mu4,critical,equilibrated,t_end,relation_residual_normalized,mu4_tail_ratio\n";
    std::vector<std::string> rows(points.size());
    parallel_for(points.size(), worker_count(common_.workers), [&](std::size_t i) {
      const Point& pt = points[i];
      const double sigma = to_double(pt.sigma);
      ModelParams q;
      q.sigma = pt.sigma;
      const ItoSde sde = convert_poly(model_zoo("power_attractor", q));
      FpConfig cfg = cfg_;
      cfg.T = pt.T;
      cfg.W = pt.W;

      const auto closure = gaussian_closure_solve(symbolic, sigma);
      const bool critical = divergence_classifier(rel.substitute(Var::sigma, pt.sigma)) == DivergenceClass::all_positive;
      const double c = 2.0 * std::pow(sigma, 6);  // naive reading: drift -x^3, noise sigma^3
      std::string row = num(sigma) + "," + num(pt.T) + "," + num(pt.W) + ",";
      try {
        const FpResult r = evolve(sde, cfg);
        const auto m = grid_moments(r.rho, {2, 4});
        const double mu2 = m.moments.at(2), mu4 = m.moments.at(4);
        row += std::string(r.diagnostics.equilibrated ? "ok" : "not_equilibrated") + "," + num(r.rho.x_max) + "," +
               num(mu2) + "," + num(mu4) + "," + num(mu4 / (3 * mu2 * mu2)) + ",";
        row += (closure.status == ClosureStatus::ok ? num(closure.mu2) : "nan") + "," + to_string(closure.status) + "," +
               (closure.in_validity_domain ? "true" : "false") + ",";
        row += num(quartic_moment(2, c)) + "," + num(quartic_moment(4, c)) + "," + (critical ? "true" : "false") + "," +
               (r.diagnostics.equilibrated ? "true" : "false") + "," + num(r.diagnostics.t) + "," +
               num(r.diagnostics.relation_residual_normalized) + "," + num(m.tail_ratio.at(4));
      } catch (const AutoscaleDiverged& e) {
        // the equilibrium width itself runs away: a soft flag like NotEquilibrated
        row += "autoscale_diverged,nan,nan,nan,nan," +
               (closure.status == ClosureStatus::ok ? num(closure.mu2) : "nan") + "," + to_string(closure.status) +
               "," + (closure.in_validity_domain ? "true" : "false") + "," + num(quartic_moment(2, c)) + "," +
               num(quartic_moment(4, c)) + "," + (critical ? "true" : "false") + ",false,nan,nan,nan";
      }
      rows[i] = row + "\n";
      char name[32];
      std::snprintf(name, sizeof name, "%05zu.csv", i);
      write_file_atomic(dir / "points" / name, header + rows[i]);
    });

    std::string csv = header;
    for (const auto& r : rows) csv += r;
    write_file_atomic(dir / "fig2.csv", csv);
    std::printf("%zu points written to %s\n", rows.size(), (dir / "fig2.csv").c_str());
    std::printf("critical boundary: sigma^2 = 2/9 (sigma = %.6f)\n", std::sqrt(2.0) / 3.0);
    return 0;
  }

 private:
  Settings settings_{nullptr};
  Common common_;
  FpConfig cfg_;
  std::string sigmas_ = "0.05:0.7:0.05";
  std::vector<double> t_list_{10.0, 100.0};
  std::vector<double> w_list_{8.0, 16.0, 32.0};
};

class Sweep : public Command {
 public:
  explicit Sweep(CLI::App& root) {
    app = root.add_subcommand("sweep", "Vary one model parameter; FP, EM or closure per value");
    settings_ = Settings(app);
    add_common(app, settings_, common_, true, true);
    settings_.add("param", param_, "Model key to vary (sigma, n, a or b)");
    settings_.add("values", values_, "Values: lo:hi:step or a comma list");
    settings_.add("method", method_, "fp, em or closure");
    fp_.add(settings_, true);
    settings_.add("paths", em_.n_paths, "EM paths");
    settings_.add("em-dt", em_.dt, "EM time step");
    settings_.add("seed", em_.seed, "EM root seed");
    settings_.add("x0", x0_, "EM initial condition");
    settings_.flag("naive", naive_, "Use the naive reading: drift R(x, 0), constant noise");
  }

  int run() override {
    const ModelSpec base = resolve(*app, settings_, common_, true);
    if (param_ != "sigma" && param_ != "n" && param_ != "a" && param_ != "b")
      throw std::invalid_argument("param must be one of sigma, n, a, b");
    if (method_ != "fp" && method_ != "em" && method_ != "closure")
      throw std::invalid_argument("method must be fp, em or closure");
    const auto values = parse_rational_list(values_);
    const FpConfig fp_cfg = fp_.resolved();
    EmConfig em = em_;
    em.t_final = fp_cfg.T;
    em.x0 = parse_initial_condition(x0_);
    em.workers = 1;  // parallel over sweep points instead
    if (method_ == "em") validate(em);
    write_manifest(common_.out, "sweep", &base, settings_);

    const fs::path dir(common_.out);
    fs::create_directories(dir / "points");
    const std::string header =
        "value,status,mu2,mu2_se,mu4,mu4_se,kurtosis_ratio,relation_residual_normalized,closure_mu2,closure_status\n";
    std::vector<std::string> rows(values.size());
    parallel_for(values.size(), worker_count(common_.workers), [&](std::size_t i) {
      const ModelSpec spec = parse_model_spec(to_text(base) + param_ + " = " + to_string(values[i]) + "\n");
      const NoiseExpansion rate = build_model(spec);
      const ItoSde sde = to_sde(rate, naive_, default_probes(fp_cfg.domain));
      std::string status = "ok";
      double mu2 = NAN, mu4 = NAN, se2 = NAN, se4 = NAN;
      if (method_ == "fp") {
        const FpResult r = evolve(sde, fp_cfg);
        const auto m = grid_moments(r.rho, {2, 4});
        mu2 = m.moments.at(2);
        mu4 = m.moments.at(4);
        if (!r.diagnostics.equilibrated) status = "not_equilibrated";
      } else if (method_ == "em") {
        const EnsembleSummary s = run_ensemble(sde, em);
        mu2 = s.moment(2).value;
        se2 = s.moment(2).standard_error;
        mu4 = s.moment(4).value;
        se4 = s.moment(4).standard_error;
        if (s.n_nonfinite > 0) status = "nonfinite_" + num(s.nonfinite_fraction());
      }
      double residual = NAN, closure_mu2 = NAN;
      std::string closure_status = "n/a";
      if (sde.has_polynomial_forms()) {
        const MomentRelation rel = leading_order_relation(sde, 1);
        if (rel.is_numeric() && std::isfinite(mu4)) {
          MomentSequence ms;
          ms.values = {{2, mu2}, {4, mu4}};
          residual = normalized_residual(rel, ms);
        }
        if (spec.params.sigma) {
          const auto c = gaussian_closure_solve(sde, to_double(*spec.params.sigma));
          closure_status = to_string(c.status);
          if (c.status == ClosureStatus::ok) closure_mu2 = c.mu2;
        }
      }
      rows[i] = to_string(values[i]) + "," + status + "," + num(mu2) + "," + num(se2) + "," + num(mu4) + "," +
                num(se4) + "," + num(mu4 / (3 * mu2 * mu2)) + "," + num(residual) + "," + num(closure_mu2) + "," +
                closure_status + "\n";
      char name[32];
      std::snprintf(name, sizeof name, "%05zu.csv", i);
      write_file_atomic(dir / "points" / name, header + rows[i]);
    });

    std::string csv = header;
    for (const auto& r : rows) csv += r;
    write_file_atomic(dir / "sweep.csv", csv);
    std::cout << csv;
    return 0;
  }

 private:
  Settings settings_{nullptr};
  Common common_;
  FpOptions fp_;
  EmConfig em_ = [] {
    EmConfig c;
    c.n_paths = 10000;
    c.dt = 1e-3;
    return c;
  }();
  std::string param_ = "sigma";
  std::string values_;
  std::string method_ = "fp";
  std::string x0_ = "0";
  bool naive_ = false;
};

}  // namespace

std::vector<std::unique_ptr<Command>> register_commands(CLI::App& root) {
  std::vector<std::unique_ptr<Command>> commands;
  commands.push_back(std::make_unique<Convert>(root));
  commands.push_back(std::make_unique<Simulate>(root));
  commands.push_back(std::make_unique<Fp>(root));
  commands.push_back(std::make_unique<Moments>(root));
  commands.push_back(std::make_unique<Fig1>(root));
  commands.push_back(std::make_unique<Fig2>(root));
  commands.push_back(std::make_unique<Sweep>(root));
  return commands;
}

}  // namespace itolab::cli
