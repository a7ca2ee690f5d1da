#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace itolab {

using Rational = mpq_class;

/// Symbols a polynomial may carry. `x` is the state variable, `sigma` the
/// noise amplitude and `dt` the Euler-Maruyama time step.
enum class Var : int { x = 0, sigma = 1, dt = 2 };

inline constexpr int kNumVars = 3;

/// Parse a decimal literal ("0.2", "-1.5e-3", "3/7") into an exact rational.
Rational parse_rational(const std::string& text);

/// Exact rational value of a double (every finite double is a dyadic rational).
Rational to_rational(double value);

double to_double(const Rational& value);

/// Sparse multivariate polynomial in (x, sigma, dt) with exact rational
/// coefficients. Zero coefficients are never stored, so structural equality is
/// mathematical equality.
class Polynomial {
 public:
  using Exponents = std::array<int, kNumVars>;
  using Terms = std::map<Exponents, Rational>;

  Polynomial() = default;
  Polynomial(const Rational& constant);  // NOLINT: implicit lift of scalars
  Polynomial(int constant);              // NOLINT

  static Polynomial variable(Var v, int power = 1);
  static Polynomial monomial(const Rational& coefficient, Exponents exponents);

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const;
  /// True when the symbol appears with a nonzero power in some term.
  bool depends_on(Var v) const;
  int degree(Var v) const;

  Rational coefficient(const Exponents& exponents) const;
  /// Constant value; throws UnboundSymbol when the polynomial is not constant.
  Rational constant_value() const;

  /// Coefficients of successive powers of `v`; entry j multiplies v^j and no
  /// longer contains `v`.
  std::vector<Polynomial> coefficients_in(Var v) const;

  Polynomial substitute(Var v, const Rational& value) const;
  /// Replace `v` by another polynomial.
  Polynomial compose(Var v, const Polynomial& replacement) const;

  Polynomial pow(unsigned n) const;

  /// Floating evaluation; symbols missing from `values` must not appear.
  double evaluate(double x, double sigma = 0.0, double dt = 0.0) const;
  Rational evaluate_exact(const Rational& x, const Rational& sigma = 0,
                          const Rational& dt = 0) const;

  /// True when every sigma exponent is even, i.e. the polynomial is a
  /// polynomial in sigma^2.
  bool even_in(Var v) const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);

  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
  friend Polynomial operator-(const Polynomial& p);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  /// Human-readable form, e.g. "9*sigma^2*x^4 + 36*sigma^4*x^2 + 15*sigma^6".
  /// Terms are ordered by descending x, then descending sigma, then dt.
  std::string to_string() const;

 private:
  void add_term(const Exponents& e, const Rational& c);

  Terms terms_;
};

std::string to_string(const Rational& value);
const char* var_name(Var v);

/// Dense double-precision image of a polynomial in x alone, for hot loops.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  /// Throws UnboundSymbol if `p` depends on anything but x.
  explicit CompiledPolynomial(const Polynomial& p);

  double operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

 private:
  std::vector<double> coefficients_;
};

}  // namespace itolab
