#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "itolab/polynomial.hpp"

namespace itolab {

struct DriftDiffusion {
  double drift = 0.0;
  double diffusion = 0.0;  // G(x) >= 0
};

/// Autonomous Ito SDE dx = F(x) dt + G(x) dW.
///
/// Either carries exact polynomial forms of F and G^2 (in x, possibly with a
/// symbolic sigma) or only numerical evaluators. Instances are immutable and
/// cheap to copy; evaluation is safe from any number of threads.
class ItoSde {
 public:
  using Evaluator = std::function<DriftDiffusion(double x)>;

  /// Exact forms. The SDE is evaluable only once every symbol besides x is
  /// bound (see bind_sigma).
  static ItoSde from_polynomials(Polynomial drift, Polynomial diffusion_squared, std::string label = {});
  static ItoSde from_evaluator(Evaluator evaluator, std::string label = {});
  static ItoSde from_functions(std::function<double(double)> drift, std::function<double(double)> diffusion,
                               std::string label = {});

  bool has_polynomial_forms() const noexcept;
  /// Throws NonPolynomial when exact forms are absent.
  const Polynomial& drift_polynomial() const;
  const Polynomial& diffusion_squared_polynomial() const;

  /// False while polynomial forms still contain a free sigma.
  bool is_evaluable() const noexcept;

  DriftDiffusion evaluate(double x) const;
  double drift(double x) const { return evaluate(x).drift; }
  double diffusion(double x) const { return evaluate(x).diffusion; }

  /// Batch evaluation; spans must have equal length.
  void evaluate(std::span<const double> x, std::span<double> drift, std::span<double> diffusion) const;

  /// Substitute a value for sigma in the polynomial forms.
  ItoSde bind_sigma(const Rational& sigma) const;

  const std::string& label() const noexcept;

 private:
  struct State;
  explicit ItoSde(std::shared_ptr<const State> state) : state_(std::move(state)) {}

  std::shared_ptr<const State> state_;
};

}  // namespace itolab
