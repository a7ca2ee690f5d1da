#include "itolab/moment_relation.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "itolab/error.hpp"
#include "itolab/gaussian_moments.hpp"

namespace itolab {

namespace {

// Splits a polynomial in x into the relation c_0 + sum c_j mu_j.
MomentRelation from_expectation_integrand(const Polynomial& integrand, RelationProvenance provenance, int k) {
  MomentRelation rel;
  rel.provenance = provenance;
  rel.k = k;
  const auto by_power = integrand.coefficients_in(Var::x);
  for (std::size_t j = 0; j < by_power.size(); ++j) {
    if (by_power[j].is_zero()) continue;
    if (j == 0)
      rel.constant = by_power[j];
    else
      rel.coefficients[static_cast<int>(j)] = by_power[j];
  }
  return rel;
}

Rational binomial(unsigned n, unsigned k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rational(b);
}

double numeric(const Polynomial& p) { return to_double(p.constant_value()); }

}  // namespace

const char* to_string(RelationProvenance p) {
  switch (p) {
    case RelationProvenance::leading_order:
      return "leading-order";
    case RelationProvenance::exact_in_dt:
      return "exact-in-dt";
    case RelationProvenance::closure:
      return "closure";
  }
  return "?";
}

const char* to_string(ClosureStatus s) {
  switch (s) {
    case ClosureStatus::ok:
      return "ok";
    case ClosureStatus::no_positive_root:
      return "no-positive-root";
    case ClosureStatus::degenerate:
      return "degenerate";
  }
  return "?";
}

const char* to_string(DivergenceClass c) {
  return c == DivergenceClass::all_positive ? "all-positive" : "indeterminate";
}

Polynomial MomentRelation::coefficient(int order) const {
  if (order == 0) return constant;
  const auto it = coefficients.find(order);
  return it == coefficients.end() ? Polynomial() : it->second;
}

bool MomentRelation::is_numeric() const {
  if (!constant.is_constant()) return false;
  for (const auto& [order, c] : coefficients)
    if (!c.is_constant()) return false;
  return true;
}

MomentRelation MomentRelation::substitute(Var v, const Rational& value) const {
  MomentRelation out;
  out.provenance = provenance;
  out.k = k;
  out.constant = constant.substitute(v, value);
  for (const auto& [order, c] : coefficients) {
    Polynomial s = c.substitute(v, value);
    if (!s.is_zero()) out.coefficients[order] = std::move(s);
  }
  return out;
}

MomentRelation MomentRelation::substitute_sigma_squared(const Rational& sigma_squared) const {
  Rational s2 = sigma_squared;
  s2.canonicalize();
  auto sub = [&](const Polynomial& p) {
    if (!p.even_in(Var::sigma)) throw std::invalid_argument("relation has an odd power of sigma");
    Polynomial out;
    for (const auto& [e, c] : p.terms()) {
      Rational factor = 1;
      for (int i = 0; i < e[static_cast<int>(Var::sigma)] / 2; ++i) factor *= s2;
      Polynomial::Exponents rest = e;
      rest[static_cast<int>(Var::sigma)] = 0;
      out += Polynomial::monomial(c * factor, rest);
    }
    return out;
  };
  MomentRelation out;
  out.provenance = provenance;
  out.k = k;
  out.constant = sub(constant);
  for (const auto& [order, c] : coefficients) {
    Polynomial s = sub(c);
    if (!s.is_zero()) out.coefficients[order] = std::move(s);
  }
  return out;
}

std::string MomentRelation::to_string() const {
  std::ostringstream os;
  os << "0 = ";
  bool first = true;
  auto emit = [&](const Polynomial& c, const std::string& moment) {
    std::string text = c.to_string();
    const bool compound = c.terms().size() > 1;
    bool negative = false;
    if (!compound && !text.empty() && text[0] == '-') {
      negative = true;
      text = text.substr(1);
    }
    if (first) {
      if (negative) os << "-";
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    if (moment.empty()) {
      os << text;
    } else if (compound) {
      os << "(" << text << ")*" << moment;
    } else if (text == "1") {
      os << moment;
    } else {
      os << text << "*" << moment;
    }
  };
  if (!constant.is_zero()) emit(constant, "");
  for (const auto& [order, c] : coefficients) emit(c, "mu" + std::to_string(order));
  if (first) os << "0";
  return os.str();
}

bool operator==(const MomentRelation& a, const MomentRelation& b) {
  return a.constant == b.constant && a.coefficients == b.coefficients;
}

double MomentSequence::at(int order) const {
  if (order == 0) return 1.0;
  const auto it = values.find(order);
  if (it == values.end()) throw MissingMoment("moment of order " + std::to_string(order) + " not supplied");
  if (!std::isfinite(it->second)) throw MissingMoment("moment of order " + std::to_string(order) + " is not finite");
  return it->second;
}

bool MomentSequence::is_finite(int order) const {
  if (order == 0) return true;
  const auto it = values.find(order);
  return it != values.end() && std::isfinite(it->second);
}

bool MomentSequence::hankel_consistent(double tolerance) const {
  if (is_finite(2) && at(2) < -tolerance) return false;
  if (is_finite(2) && is_finite(4) && at(4) - at(2) * at(2) < -tolerance) return false;
  if (is_finite(2) && is_finite(4) && is_finite(6) && is_finite(8)) {
    const double m2 = at(2), m4 = at(4), m6 = at(6), m8 = at(8);
    const double det = 1.0 * (m4 * m8 - m6 * m6) - m2 * (m2 * m8 - m6 * m4) + m4 * (m2 * m6 - m4 * m4);
    if (det < -tolerance) return false;
  }
  return true;
}

MomentSequence MomentSequence::gaussian(double variance, int max_order) {
  MomentSequence s;
  for (int k = 1; k <= max_order; ++k)
    s.values[k] = to_double(standard_normal_moment(static_cast<unsigned>(k))) * std::pow(variance, 0.5 * k);
  return s;
}

MomentRelation leading_order_relation(const ItoSde& sde, int k) {
  if (k < 1) throw std::invalid_argument("leading_order_relation: k must be >= 1");
  const Polynomial& f = sde.drift_polynomial();
  const Polynomial& g2 = sde.diffusion_squared_polynomial();
  const Polynomial x = Polynomial::variable(Var::x);
  const auto uk = static_cast<unsigned>(k);
  Polynomial integrand = Polynomial(2 * k) * x.pow(2 * uk - 1) * f;
  integrand += Polynomial(k * (2 * k - 1)) * x.pow(2 * uk - 2) * g2;
  return from_expectation_integrand(integrand, RelationProvenance::leading_order, k);
}

MomentRelation exact_relation_in_dt(const ItoSde& sde, int k, const std::optional<Rational>& dt) {
  if (k < 1) throw std::invalid_argument("exact_relation_in_dt: k must be >= 1");
  const Polynomial& f = sde.drift_polynomial();
  const Polynomial& g2 = sde.diffusion_squared_polynomial();
  const Polynomial x = Polynomial::variable(Var::x);
  const Polynomial step = Polynomial::variable(Var::dt);
  const Polynomial mean = x + f * step;
  const Polynomial variance = g2 * step;
  const auto n = static_cast<unsigned>(2 * k);

  // E[(a + s eta)^{2k}] = sum_i C(2k, 2i) (2i-1)!! s^{2i} a^{2k-2i}
  Polynomial expectation;
  for (unsigned i = 0; 2 * i <= n; ++i)
    expectation += Polynomial(binomial(n, 2 * i) * standard_normal_moment(2 * i)) * variance.pow(i) * mean.pow(n - 2 * i);
  const Polynomial increment = expectation - x.pow(n);

  // Every term carries at least one power of dt; divide it out.
  Polynomial per_dt;
  for (const auto& [e, c] : increment.terms()) {
    if (e[static_cast<int>(Var::dt)] < 1) throw std::logic_error("exact_relation_in_dt: dt-free increment term");
    auto lowered = e;
    --lowered[static_cast<int>(Var::dt)];
    per_dt += Polynomial::monomial(c, lowered);
  }
  MomentRelation rel = from_expectation_integrand(per_dt, RelationProvenance::exact_in_dt, k);
  if (dt) rel = rel.substitute(Var::dt, *dt);
  return rel;
}

ClosureResult gaussian_closure_solve(const ItoSde& sde, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_closure_solve: sigma must be positive");
  MomentRelation rel = leading_order_relation(sde, 1).substitute(Var::sigma, to_rational(sigma));
  for (const auto& [order, c] : rel.coefficients)
    if (order != 2 && order != 4)
      throw UnsupportedModel("Gaussian closure needs a relation in mu2 and mu4 only; found mu" + std::to_string(order));
  if (!rel.is_numeric()) throw UnboundSymbol("Gaussian closure: relation still has free symbols");

  ClosureResult r;
  r.c0 = numeric(rel.constant);
  r.c2 = numeric(rel.coefficient(2));
  r.c4 = numeric(rel.coefficient(4));
  const double qa = 3.0 * r.c4;
  const double qb = r.c2;
  const double qc = r.c0;
  const double scale = std::abs(qa) + std::abs(qb) + std::abs(qc);

  auto finish = [&](double root) {
    if (root > 0.0 && std::isfinite(root)) {
      r.mu2 = root;
      r.in_validity_domain = root < 0.1 * sigma * sigma;
    } else if (r.status == ClosureStatus::ok) {
      r.status = ClosureStatus::no_positive_root;
    }
    return r;
  };

  if (std::abs(qa) <= 1e-12 * scale) {
    r.status = ClosureStatus::degenerate;
    if (qb == 0.0) return r;
    return finish(-qc / qb);
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) {
    r.status = ClosureStatus::no_positive_root;
    return r;
  }
  const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
  const double r1 = q != 0.0 ? qc / q : 0.0;
  const double r2 = q / qa;
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double root : {r1, r2})
    if (root > 0.0 && (!(best > 0.0) || root < best)) best = root;
  return finish(best);
}

DivergenceClass divergence_classifier(const MomentRelation& relation) {
  if (!relation.is_numeric()) throw UnboundSymbol("divergence_classifier needs numeric coefficients");
  if (!(relation.constant.constant_value() > 0)) return DivergenceClass::indeterminate;
  bool any_positive = false;
  for (const auto& [order, c] : relation.coefficients) {
    const Rational v = c.constant_value();
    if (v == 0) continue;
    if (order % 2 != 0) return DivergenceClass::indeterminate;
    if (v < 0) return DivergenceClass::indeterminate;
    any_positive = true;
  }
  return any_positive ? DivergenceClass::all_positive : DivergenceClass::indeterminate;
}

double relation_residual(const MomentRelation& relation, const MomentSequence& moments) {
  if (!relation.is_numeric()) throw UnboundSymbol("relation_residual needs numeric coefficients");
  double r = numeric(relation.constant);
  for (const auto& [order, c] : relation.coefficients) r += numeric(c) * moments.at(order);
  return r;
}

double normalized_residual(const MomentRelation& relation, const MomentSequence& moments) {
  if (!relation.is_numeric()) throw UnboundSymbol("normalized_residual needs numeric coefficients");
  double scale = std::abs(numeric(relation.constant));
  for (const auto& [order, c] : relation.coefficients) scale += std::abs(numeric(c) * moments.at(order));
  const double r = relation_residual(relation, moments);
  return scale > 0.0 ? std::abs(r) / scale : std::abs(r);
}

}  // namespace itolab
