#include "itolab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "itolab/error.hpp"

namespace itolab {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

GaussHermiteRule golub_welsch(int order) {
  // Jacobi matrix of the physicists' Hermite recurrence: zero diagonal,
  // off-diagonal sqrt(i/2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order > 1 ? order - 1 : 0);
  for (int i = 1; i < order; ++i) sub(i - 1) = std::sqrt(0.5 * i);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NonConvergence("Golub-Welsch eigensolve failed");

  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  for (int i = 0; i < order; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = values(i);
    const double v0 = vectors(0, i);
    rule.weights[static_cast<std::size_t>(i)] = kSqrtPi * v0 * v0;
  }
  // Eigenvalues come sorted; impose the exact mirror symmetry of the rule.
  for (int i = 0; i < order / 2; ++i) {
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    const double t = 0.5 * (rule.nodes[hi] - rule.nodes[lo]);
    const double w = 0.5 * (rule.weights[hi] + rule.weights[lo]);
    rule.nodes[lo] = -t;
    rule.nodes[hi] = t;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(int order) {
  if (order < 1) throw std::invalid_argument("Gauss-Hermite order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const GaussHermiteRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end())
    it = cache.emplace(order, std::make_unique<const GaussHermiteRule>(golub_welsch(order))).first;
  return *it->second;
}

double gauss_hermite_expect(const RealFunction& f, const GaussianParams& p, int order) {
  if (order < 2) throw std::invalid_argument("gauss_hermite_expect: order must be >= 2");
  const auto& rule = gauss_hermite_rule(order);
  const double scale = p.std() * kSqrt2;
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    if (rule.weights[i] == 0.0) continue;
    total += rule.weights[i] * f(p.mean() + scale * rule.nodes[i]);
  }
  return total / kSqrtPi;
}

AdaptiveResult gauss_hermite_expect_adaptive(const RealFunction& f, const GaussianParams& p,
                                             const AdaptiveQuadratureOptions& options) {
  int order = std::max(2, options.initial_order);
  double previous = gauss_hermite_expect(f, p, order);
  while (2 * order <= options.max_order) {
    order *= 2;
    const double current = gauss_hermite_expect(f, p, order);
    const double scale = std::max(std::abs(current), 1e-3);
    if (std::abs(current - previous) <= options.relative_tolerance * scale) return {current, order};
    previous = current;
  }
  throw NonConvergence("Gauss-Hermite estimates did not settle to relative tolerance " +
                       std::to_string(options.relative_tolerance) + " by order " +
                       std::to_string(options.max_order));
}

double gaussian_expect_kronrod(const RealFunction& f, const GaussianParams& p, double relative_tolerance) {
  auto integrand = [&](double eta) {
    const double weight = kInvSqrt2Pi * std::exp(-0.5 * eta * eta);
    if (weight == 0.0) return 0.0;
    return weight * f(p.mean() + p.std() * eta);
  };
  double error = 0.0;
  double l1 = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, -inf, inf, 30, relative_tolerance, &error, &l1);
  if (!std::isfinite(value) || error > 100.0 * relative_tolerance * std::max(l1, 1e-300))
    throw NonConvergence("Gauss-Kronrod error estimate " + std::to_string(error) +
                         " exceeds tolerance");
  return value;
}

}  // namespace itolab
