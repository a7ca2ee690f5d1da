#include "itolab/ito_sde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "itolab/error.hpp"

namespace itolab {

namespace {

// Horner per coefficient across the whole batch so the inner loops vectorise.
void horner_batch(const double* c, std::size_t degree_plus_one, const double* __restrict x, double* __restrict out,
                  std::size_t n) {
  if (degree_plus_one == 0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  const double top = c[degree_plus_one - 1];
  for (std::size_t i = 0; i < n; ++i) out[i] = top;
  for (std::size_t j = degree_plus_one - 1; j-- > 0;) {
    const double cj = c[j];
    for (std::size_t i = 0; i < n; ++i) out[i] = out[i] * x[i] + cj;
  }
}

}  // namespace

struct ItoSde::State {
  std::optional<Polynomial> drift_poly;
  std::optional<Polynomial> diffusion_sq_poly;
  bool evaluable = false;
  CompiledPolynomial drift_compiled;
  CompiledPolynomial diffusion_sq_compiled;
  Evaluator evaluator;
  std::string label;
};

ItoSde ItoSde::from_polynomials(Polynomial drift, Polynomial diffusion_squared, std::string label) {
  auto state = std::make_shared<State>();
  state->evaluable = !(drift.depends_on(Var::sigma) || drift.depends_on(Var::dt) ||
                       diffusion_squared.depends_on(Var::sigma) || diffusion_squared.depends_on(Var::dt));
  if (state->evaluable) {
    state->drift_compiled = CompiledPolynomial(drift);
    state->diffusion_sq_compiled = CompiledPolynomial(diffusion_squared);
  }
  state->drift_poly = std::move(drift);
  state->diffusion_sq_poly = std::move(diffusion_squared);
  state->label = std::move(label);
  return ItoSde(std::move(state));
}

ItoSde ItoSde::from_evaluator(Evaluator evaluator, std::string label) {
  if (!evaluator) throw std::invalid_argument("ItoSde needs an evaluator");
  auto state = std::make_shared<State>();
  state->evaluable = true;
  state->evaluator = std::move(evaluator);
  state->label = std::move(label);
  return ItoSde(std::move(state));
}

ItoSde ItoSde::from_functions(std::function<double(double)> drift, std::function<double(double)> diffusion,
                              std::string label) {
  if (!drift || !diffusion) throw std::invalid_argument("ItoSde needs drift and diffusion functions");
  return from_evaluator(
      [drift = std::move(drift), diffusion = std::move(diffusion)](double x) {
        return DriftDiffusion{drift(x), diffusion(x)};
      },
      std::move(label));
}

bool ItoSde::has_polynomial_forms() const noexcept { return state_->drift_poly.has_value(); }

const Polynomial& ItoSde::drift_polynomial() const {
  if (!state_->drift_poly) throw NonPolynomial("SDE '" + state_->label + "' has no exact drift polynomial");
  return *state_->drift_poly;
}

const Polynomial& ItoSde::diffusion_squared_polynomial() const {
  if (!state_->diffusion_sq_poly)
    throw NonPolynomial("SDE '" + state_->label + "' has no exact diffusion polynomial");
  return *state_->diffusion_sq_poly;
}

bool ItoSde::is_evaluable() const noexcept { return state_->evaluable; }

DriftDiffusion ItoSde::evaluate(double x) const {
  const State& s = *state_;
  if (!s.evaluable) throw UnboundSymbol("SDE '" + s.label + "' has an unbound sigma; call bind_sigma first");
  if (s.evaluator) return s.evaluator(x);
  return {s.drift_compiled(x), std::sqrt(std::max(0.0, s.diffusion_sq_compiled(x)))};
}

void ItoSde::evaluate(std::span<const double> x, std::span<double> drift, std::span<double> diffusion) const {
  if (drift.size() != x.size() || diffusion.size() != x.size())
    throw std::invalid_argument("ItoSde::evaluate: span sizes differ");
  const State& s = *state_;
  if (!s.evaluable) throw UnboundSymbol("SDE '" + s.label + "' has an unbound sigma; call bind_sigma first");
  if (s.evaluator) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto r = s.evaluator(x[i]);
      drift[i] = r.drift;
      diffusion[i] = r.diffusion;
    }
    return;
  }
  const std::vector<double>& fc = s.drift_compiled.coefficients();
  const std::vector<double>& gc = s.diffusion_sq_compiled.coefficients();
  horner_batch(fc.data(), fc.size(), x.data(), drift.data(), x.size());
  horner_batch(gc.data(), gc.size(), x.data(), diffusion.data(), x.size());
  double* __restrict g = diffusion.data();
  // gmpxx.h defeats inlining of std::sqrt; the builtin vectorises.
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = __builtin_sqrt(std::max(0.0, g[i]));
}

ItoSde ItoSde::bind_sigma(const Rational& sigma) const {
  if (!has_polynomial_forms()) return *this;
  return from_polynomials(state_->drift_poly->substitute(Var::sigma, sigma),
                          state_->diffusion_sq_poly->substitute(Var::sigma, sigma), state_->label);
}

const std::string& ItoSde::label() const noexcept { return state_->label; }

}  // namespace itolab
