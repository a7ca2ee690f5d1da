#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "itolab/converter.hpp"
#include "itolab/error.hpp"
#include "itolab/euler_maruyama.hpp"
#include "itolab/model_zoo.hpp"
#include "itolab/rng.hpp"

using namespace itolab;

namespace {

ItoSde ou_sde(double a = 1.0, double b = 1.0) {
  ModelParams p;
  p.a = to_rational(a);
  p.b = to_rational(b);
  return convert_poly(model_zoo("ou", p));
}

ItoSde cubic_sde(const Rational& sigma) {
  ModelParams p;
  p.sigma = sigma;
  return convert_poly(model_zoo("power_attractor", p));
}

}  // namespace

TEST(EmStep, NoDriftNoNoiseIsIdentity) {
  const ItoSde still = ItoSde::from_functions([](double) { return 0.0; }, [](double) { return 0.0; });
  EXPECT_EQ(em_step(0.7, still, 0.01, 1.3), 0.7);
}

TEST(EmStep, CubicAtOriginIsPureNoise) {
  const double sigma = 0.2;
  EXPECT_NEAR(em_step(0.0, cubic_sde(Rational(1, 5)), 0.01, 1.0), std::sqrt(15 * std::pow(sigma, 6)) * 0.1, 1e-17);
}

TEST(EmStep, OrnsteinUhlenbeckDriftOnly) {
  EXPECT_NEAR(em_step(1.0, ou_sde(), 0.1, 0.0), 0.9, 1e-16);
}

TEST(EmStep, NonFiniteStateThrows) {
  const ItoSde wild = ItoSde::from_functions([](double x) { return -x * x * x; }, [](double) { return 0.0; });
  EXPECT_THROW(em_step(1e120, wild, 1.0, 0.0), NonFiniteState);
}

TEST(EmConfig, Validation) {
  EmConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.dt = 0.0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.dt = 2.0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.n_paths = 0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.record_stride = 0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.dt = 0.3;
  cfg.t_final = 1.0;
  EXPECT_EQ(step_count(cfg), 3u);
}

TEST(InitialConditionText, ParsesAndPrints) {
  const auto d = parse_initial_condition("0.5");
  EXPECT_EQ(d.kind, InitialCondition::Kind::delta);
  EXPECT_EQ(d.a, 0.5);
  const auto n = parse_initial_condition("normal:0,0.1");
  EXPECT_EQ(n.kind, InitialCondition::Kind::normal);
  EXPECT_EQ(n.b, 0.1);
  const auto u = parse_initial_condition("uniform:-1,1");
  EXPECT_EQ(u.kind, InitialCondition::Kind::uniform);
  for (const auto& ic : {d, n, u}) {
    const auto back = parse_initial_condition(to_string(ic));
    EXPECT_EQ(back.kind, ic.kind);
    EXPECT_EQ(back.a, ic.a);
    EXPECT_EQ(back.b, ic.b);
  }
  EXPECT_THROW(parse_initial_condition("normal:0,-1"), std::invalid_argument);
  EXPECT_THROW(parse_initial_condition("uniform:1,0"), std::invalid_argument);
  EXPECT_THROW(parse_initial_condition("0.5x"), std::invalid_argument);
}

TEST(RunEnsemble, SinglePathSingleStep) {
  EmConfig cfg;
  cfg.n_paths = 1;
  cfg.dt = 0.1;
  cfg.t_final = 0.1;
  cfg.x0 = InitialCondition::delta(1.0);
  const auto s = run_ensemble(ou_sde(), cfg);
  auto g = path_stream(cfg.seed, 0);
  const double expect = 1.0 - 0.1 + std::sqrt(0.1) * standard_normal(g);
  EXPECT_EQ(s.n_steps, 1u);
  EXPECT_DOUBLE_EQ(s.moment(1).value, expect);
  EXPECT_TRUE(std::isinf(s.moment(1).standard_error));  // undefined from one path
}

TEST(RunEnsemble, BitIdenticalAcrossWorkerCounts) {
  EmConfig cfg;
  cfg.n_paths = 9000;  // not a multiple of the chunk size
  cfg.dt = 0.01;
  cfg.t_final = 2.0;
  cfg.x0 = InitialCondition::normal(0.0, 0.3);
  cfg.record = true;
  cfg.record_stride = 20;
  cfg.workers = 1;
  const auto a = run_ensemble(ou_sde(), cfg);
  cfg.workers = 3;
  const auto b = run_ensemble(ou_sde(), cfg);
  for (int k = 1; k <= 6; ++k) {
    EXPECT_EQ(a.moment(k).value, b.moment(k).value);
    EXPECT_EQ(a.moment(k).standard_error, b.moment(k).standard_error);
  }
  EXPECT_EQ(a.histogram.counts, b.histogram.counts);
  EXPECT_EQ(series_csv(a), series_csv(b));
  EXPECT_EQ(a.series.size(), 11u);  // t = 0 and every 20 steps
}

TEST(RunEnsemble, SeedChangesDraws) {
  EmConfig cfg;
  cfg.n_paths = 100;
  cfg.t_final = 0.1;
  const auto a = run_ensemble(ou_sde(), cfg);
  cfg.seed = 2;
  EXPECT_NE(a.moment(2).value, run_ensemble(ou_sde(), cfg).moment(2).value);
}

TEST(RunEnsemble, HistogramCountsEveryPath) {
  EmConfig cfg;
  cfg.n_paths = 5000;
  cfg.t_final = 0.5;
  cfg.dt = 0.01;
  cfg.histogram_bins = 17;
  cfg.histogram_range = std::make_pair(-0.5, 0.5);
  const auto s = run_ensemble(ou_sde(), cfg);
  const auto total = std::accumulate(s.histogram.counts.begin(), s.histogram.counts.end(), std::uint64_t{0});
  EXPECT_EQ(total, 5000u);
  ASSERT_EQ(s.histogram.edges.size(), 18u);
  EXPECT_EQ(s.histogram.edges.front(), -0.5);
  EXPECT_EQ(s.histogram.edges.back(), 0.5);
}

TEST(RunEnsemble, OrnsteinUhlenbeckVarianceRelaxes) {
  // Exact EM recursion: v' = (1 - dt)^2 v + dt, so v(n) = v_inf (1 - (1 - dt)^{2n}).
  EmConfig cfg;
  cfg.n_paths = 20000;
  cfg.dt = 0.01;
  cfg.t_final = 1.0;
  const auto s = run_ensemble(ou_sde(), cfg);
  const double v_inf = 0.01 / (1 - 0.99 * 0.99);
  const double v = v_inf * (1 - std::pow(0.99, 200));
  EXPECT_NEAR(s.moment(2).value, v, 4 * s.moment(2).standard_error);
  EXPECT_NEAR(s.moment(1).value, 0.0, 4 * s.moment(1).standard_error);
}

TEST(RunEnsemble, BlowUpsAreFrozenAndCounted) {
  // x -> x - x^3/2 is stable for |x| < 2 and escapes doubly exponentially otherwise.
  const ItoSde wild = ItoSde::from_functions([](double x) { return -x * x * x; }, [](double) { return 0.0; });
  EmConfig cfg;
  cfg.n_paths = 200;
  cfg.dt = 0.5;
  cfg.t_final = 20.0;
  cfg.x0 = InitialCondition::normal(0.0, 3.0);
  const auto s = run_ensemble(wild, cfg);
  EXPECT_GT(s.n_nonfinite, 0u);
  EXPECT_LT(s.n_nonfinite, 200u);
  EXPECT_LT(s.moment(2).value, 0.1);  // survivors decay like 1/sqrt(steps)
  const auto total = std::accumulate(s.histogram.counts.begin(), s.histogram.counts.end(), std::uint64_t{0});
  EXPECT_EQ(total, 200u);
}

TEST(RunEnsemble, UnboundSigmaRejected) {
  ModelParams p;
  EmConfig cfg;
  EXPECT_THROW(run_ensemble(convert_poly(model_zoo("power_attractor", p)), cfg), UnboundSymbol);
}

TEST(DirectLangevin, VarianceShrinksWithTimeStep) {
  ModelParams p;
  p.sigma = Rational(1, 5);
  const NoiseExpansion rate = model_zoo("power_attractor", p);
  EmConfig cfg;
  cfg.n_paths = 2000;
  cfg.t_final = 20.0;
  double previous = INFINITY;
  for (double dt : {0.1, 0.01, 0.001}) {
    cfg.dt = dt;
    const double mu2 = run_direct_langevin(rate, cfg).moment(2).value;
    EXPECT_LT(mu2, 0.5 * previous) << dt;
    previous = mu2;
  }
}

TEST(Probe, RowsUseDistinctSeeds) {
  EmConfig cfg;
  cfg.n_paths = 2000;
  cfg.t_final = 2.0;
  const auto table = timestep_independence_probe(ou_sde(), cfg, {0.01, 0.005});
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0].seed, cfg.seed);
  EXPECT_EQ(table.rows[1].seed, cfg.seed + 1);
  EXPECT_EQ(table.z_mu2[0][0], 0.0);
  EXPECT_EQ(table.z_mu2[0][1], table.z_mu2[1][0]);
  EXPECT_GE(table.max_z_mu2(), table.z_mu2[0][1]);
}

TEST(Csv, Headers) {
  EmConfig cfg;
  cfg.n_paths = 10;
  cfg.t_final = 0.01;
  cfg.dt = 0.01;
  cfg.record = true;
  const auto s = run_ensemble(ou_sde(), cfg);
  EXPECT_EQ(series_csv(s).rfind("t,mean,m2,m4\n", 0), 0u);
  EXPECT_EQ(summary_csv(s).rfind("order,value,standard_error\n", 0), 0u);
  EXPECT_EQ(histogram_csv(s.histogram).rfind("lower,upper,count\n", 0), 0u);
}
