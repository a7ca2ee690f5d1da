#include "itolab/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "itolab/error.hpp"

namespace itolab {

namespace {

Rational ten_power(long exponent) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  return exponent < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

Rational parse_decimal(const std::string& text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  mpz_class digits = 0;
  long scale = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      any_digit = true;
      if (seen_point) --scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("not a number: '" + text + "'");
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(text.substr(pos), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad exponent in '" + text + "'");
    }
    pos += used;
    scale += e;
  }
  if (pos != text.size()) throw std::invalid_argument("trailing characters in '" + text + "'");
  Rational value(digits);
  value *= ten_power(scale);
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

bool is_zero_exponents(const Polynomial::Exponents& e) {
  for (int p : e)
    if (p != 0) return false;
  return true;
}

std::string monomial_string(const Polynomial::Exponents& e) {
  std::string out;
  // Printed order: sigma, dt, x, so "9*sigma^2*x^4" reads like the usual notation.
  const Var order[] = {Var::sigma, Var::dt, Var::x};
  for (Var v : order) {
    const int p = e[static_cast<int>(v)];
    if (p == 0) continue;
    if (!out.empty()) out += "*";
    out += var_name(v);
    if (p != 1) out += "^" + std::to_string(p);
  }
  return out;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  return Rational(num / den);
}

Rational to_rational(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value has no rational form");
  return Rational(value);
}

double to_double(const Rational& value) { return value.get_d(); }

std::string to_string(const Rational& value) { return value.get_str(); }

const char* var_name(Var v) {
  switch (v) {
    case Var::x:
      return "x";
    case Var::sigma:
      return "sigma";
    case Var::dt:
      return "dt";
  }
  return "?";
}

Polynomial::Polynomial(const Rational& constant) { add_term(Exponents{0, 0, 0}, constant); }

Polynomial::Polynomial(int constant) : Polynomial(Rational(constant)) {}

Polynomial Polynomial::variable(Var v, int power) {
  Exponents e{0, 0, 0};
  e[static_cast<int>(v)] = power;
  return monomial(1, e);
}

Polynomial Polynomial::monomial(const Rational& coefficient, Exponents exponents) {
  for (int p : exponents)
    if (p < 0) throw std::invalid_argument("negative exponent");
  Polynomial out;
  out.add_term(exponents, coefficient);
  return out;
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
  if (c == 0) return;
  // GMP arithmetic assumes canonical operands; Rational(p, q) is not reduced.
  Rational reduced = c;
  reduced.canonicalize();
  auto [it, inserted] = terms_.emplace(e, reduced);
  if (!inserted) {
    it->second += reduced;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && is_zero_exponents(terms_.begin()->first));
}

bool Polynomial::depends_on(Var v) const {
  for (const auto& [e, c] : terms_)
    if (e[static_cast<int>(v)] != 0) return true;
  return false;
}

int Polynomial::degree(Var v) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<int>(v)]);
  return d;
}

Rational Polynomial::coefficient(const Exponents& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::constant_value() const {
  if (!is_constant()) throw UnboundSymbol("polynomial '" + to_string() + "' is not a constant");
  return coefficient({0, 0, 0});
}

std::vector<Polynomial> Polynomial::coefficients_in(Var v) const {
  const int idx = static_cast<int>(v);
  std::vector<Polynomial> out(static_cast<std::size_t>(degree(v)) + 1);
  for (const auto& [e, c] : terms_) {
    Exponents rest = e;
    rest[idx] = 0;
    out[static_cast<std::size_t>(e[idx])].add_term(rest, c);
  }
  return out;
}

Polynomial Polynomial::substitute(Var v, const Rational& value) const {
  const int idx = static_cast<int>(v);
  Rational v_canonical = value;
  v_canonical.canonicalize();
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    Exponents rest = e;
    rest[idx] = 0;
    Rational factor = 1;
    for (int i = 0; i < e[idx]; ++i) factor *= v_canonical;
    out.add_term(rest, c * factor);
  }
  return out;
}

Polynomial Polynomial::compose(Var v, const Polynomial& replacement) const {
  const auto parts = coefficients_in(v);
  Polynomial out;
  Polynomial power = 1;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    if (j > 0) power *= replacement;
    if (!parts[j].is_zero()) out += parts[j] * power;
  }
  return out;
}

Polynomial Polynomial::pow(unsigned n) const {
  Polynomial result = 1;
  Polynomial base = *this;
  while (n > 0) {
    if (n & 1U) result *= base;
    n >>= 1U;
    if (n > 0) base *= base;
  }
  return result;
}

double Polynomial::evaluate(double x, double sigma, double dt) const {
  const double values[kNumVars] = {x, sigma, dt};
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c.get_d();
    for (int v = 0; v < kNumVars; ++v)
      for (int p = 0; p < e[v]; ++p) term *= values[v];
    acc += term;
  }
  return acc;
}

Rational Polynomial::evaluate_exact(const Rational& x, const Rational& sigma, const Rational& dt) const {
  Rational values[kNumVars] = {x, sigma, dt};
  for (auto& v : values) v.canonicalize();
  Rational acc = 0;
  for (const auto& [e, c] : terms_) {
    Rational term = c;
    for (int v = 0; v < kNumVars; ++v)
      for (int p = 0; p < e[v]; ++p) term *= values[v];
    acc += term;
  }
  return acc;
}

bool Polynomial::even_in(Var v) const {
  for (const auto& [e, c] : terms_)
    if (e[static_cast<int>(v)] % 2 != 0) return false;
  return true;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  for (const auto& [e, c] : rhs.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
  *this = *this * rhs;
  return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  Polynomial out;
  for (const auto& [ea, ca] : lhs.terms_) {
    for (const auto& [eb, cb] : rhs.terms_) {
      Polynomial::Exponents e;
      for (int v = 0; v < kNumVars; ++v) e[v] = ea[v] + eb[v];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial operator-(const Polynomial& p) {
  Polynomial out;
  for (const auto& [e, c] : p.terms_) out.terms_.emplace(e, -c);
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    const bool negative = c < 0;
    const Rational magnitude = abs(c);
    if (first) {
      if (negative) os << "-";
    } else {
      os << (negative ? " - " : " + ");
    }
    const std::string mono = monomial_string(e);
    if (mono.empty()) {
      os << itolab::to_string(magnitude);
    } else if (magnitude == 1) {
      os << mono;
    } else {
      os << itolab::to_string(magnitude) << "*" << mono;
    }
    first = false;
  }
  return os.str();
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) {
  if (p.depends_on(Var::sigma) || p.depends_on(Var::dt))
    throw UnboundSymbol("cannot compile '" + p.to_string() + "': symbols other than x are unbound");
  const auto parts = p.coefficients_in(Var::x);
  coefficients_.reserve(parts.size());
  for (const auto& c : parts) coefficients_.push_back(c.is_zero() ? 0.0 : c.constant_value().get_d());
}

}  // namespace itolab
