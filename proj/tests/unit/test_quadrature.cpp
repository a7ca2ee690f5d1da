#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "itolab/error.hpp"
#include "itolab/model_zoo.hpp"
#include "itolab/quadrature.hpp"

using namespace itolab;

namespace {

// Composite Simpson over +-16 std of the Gaussian weight. Kinks in the
// integrand cost accuracy near one node only, so 2e5 panels give ~1e-12.
double simpson_expect(const std::function<double(double)>& f, double a, double s) {
  const int n = 200000;
  const double lo = -16.0, hi = 16.0, h = (hi - lo) / n;
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double eta = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    total += w * f(a + s * eta) * std::exp(-0.5 * eta * eta);
  }
  return total * h / 3.0 / std::sqrt(2 * M_PI);
}

}  // namespace

TEST(GaussHermiteRule, WeightsSumToSqrtPi) {
  for (int order : {2, 3, 8, 17, 64, 200}) {
    const auto& r = gauss_hermite_rule(order);
    ASSERT_EQ(r.nodes.size(), static_cast<std::size_t>(order));
    EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), std::sqrt(M_PI), 1e-13);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) EXPECT_EQ(r.nodes[i], -r.nodes[r.nodes.size() - 1 - i]);
  }
}

TEST(GaussHermiteRule, RejectsNonPositiveOrder) { EXPECT_THROW(gauss_hermite_rule(0), std::invalid_argument); }

TEST(GaussHermiteExpect, CubeAtUnitMean) {
  EXPECT_NEAR(gauss_hermite_expect([](double u) { return u * u * u; }, {1, 1}, 8), 4.0, 1e-12);
}

TEST(GaussHermiteExpect, ExactUpToDegreeTwoNMinusOne) {
  const int order = 6;
  for (int k = 0; k <= 2 * order - 1; ++k) {
    const double gh = gauss_hermite_expect([k](double u) { return std::pow(u, k); }, {0.0, 1.0}, order);
    const double exact = (k % 2) ? 0.0 : [k] {
      double df = 1;
      for (int j = k - 1; j > 0; j -= 2) df *= j;
      return df;
    }();
    EXPECT_NEAR(gh, exact, 1e-11 * std::max(1.0, exact)) << k;
  }
  // Degree 2n is not integrated exactly.
  EXPECT_GT(std::abs(gauss_hermite_expect([](double u) { return std::pow(u, 12); }, {0.0, 1.0}, order) - 10395.0), 1.0);
}

TEST(GaussHermiteAdaptive, ConvergesForSmoothIntegrand) {
  const auto r = gauss_hermite_expect_adaptive([](double u) { return std::cos(u); }, {0.3, 0.8});
  EXPECT_NEAR(r.value, std::cos(0.3) * std::exp(-0.32), 1e-12);
  EXPECT_GE(r.order, 16);
}

TEST(GaussHermiteAdaptive, ThrowsNonConvergenceOnKink) {
  AdaptiveQuadratureOptions opt;
  opt.max_order = 64;
  opt.relative_tolerance = 1e-14;
  EXPECT_THROW(gauss_hermite_expect_adaptive([](double u) { return u * std::abs(u) + std::abs(u); }, {0.1, 1.0}, opt),
               NonConvergence);
}

TEST(GaussianExpectKronrod, DragMeanAgainstSimpsonOracle) {
  const double sigma = 0.2;
  for (double v = -2.0; v <= 2.0; v += 0.25) {
    auto rate = [](double u) { return -u * std::abs(u); };
    const double oracle = simpson_expect(rate, v, sigma);
    EXPECT_NEAR(gaussian_expect_kronrod(rate, {v, sigma}), oracle, 1e-10) << v;
    EXPECT_NEAR(drag_mean_rate(v, sigma), oracle, 1e-10) << v;
  }
}

TEST(GaussianExpectKronrod, DragStdAgainstSimpsonOracle) {
  const double sigma = 0.2;
  for (double v = -2.0; v <= 2.0; v += 0.25) {
    const double m = simpson_expect([](double u) { return -u * std::abs(u); }, v, sigma);
    const double m2 = simpson_expect([](double u) { return u * u * u * u; }, v, sigma);
    EXPECT_NEAR(drag_rate_std(v, sigma), std::sqrt(m2 - m * m), 1e-9) << v;
  }
}
