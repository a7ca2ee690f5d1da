#pragma once

#include <map>
#include <optional>
#include <string>

#include "itolab/ito_sde.hpp"

namespace itolab {

enum class RelationProvenance { leading_order, exact_in_dt, closure };

const char* to_string(RelationProvenance p);

/// Linear identity 0 = c_0 + sum_j c_j mu_j among raw moments of an
/// equilibrium. Coefficients are exact polynomials in sigma and dt.
struct MomentRelation {
  Polynomial constant;
  std::map<int, Polynomial> coefficients;  // moment order -> coefficient, zero entries omitted
  RelationProvenance provenance = RelationProvenance::leading_order;
  int k = 1;

  /// Coefficient of mu_order (zero when absent).
  Polynomial coefficient(int order) const;
  bool is_numeric() const;  // no sigma or dt left
  MomentRelation substitute(Var v, const Rational& value) const;
  /// Binds sigma^2, which may be rational where sigma is not (e.g. 2/9).
  /// Throws std::invalid_argument if sigma appears with an odd power.
  MomentRelation substitute_sigma_squared(const Rational& sigma_squared) const;

  /// "0 = 15*sigma^6 + (36*sigma^4 - 6*sigma^2)*mu2 + (9*sigma^2 - 2)*mu4"
  std::string to_string() const;
};

bool operator==(const MomentRelation& a, const MomentRelation& b);

/// Even-order raw moments (odd orders allowed too); mu_0 = 1 is implicit. A
/// non-finite value marks a moment known to diverge.
struct MomentSequence {
  std::map<int, double> values;

  double at(int order) const;  // throws MissingMoment
  bool is_finite(int order) const;

  /// mu_2 >= 0, mu_4 >= mu_2^2 and, when mu_6 and mu_8 are known, the
  /// Hankel matrix [[1, mu2, mu4], [mu2, mu4, mu6], [mu4, mu6, mu8]] has
  /// determinant >= -tolerance.
  bool hankel_consistent(double tolerance = 1e-12) const;

  static MomentSequence gaussian(double variance, int max_order);
};

/// E over the equilibrium of the generator applied to x^{2k}:
/// 2k x^{2k-1} F + k (2k - 1) x^{2k-2} G^2, with x^j mapped to mu_j.
/// Throws NonPolynomial without exact forms.
MomentRelation leading_order_relation(const ItoSde& sde, int k);

/// (E[(x + F dt + G sqrt(dt) eta)^{2k}] - x^{2k}) / dt averaged over the
/// equilibrium, keeping every power of dt. With `dt` unset the result stays
/// symbolic in dt.
MomentRelation exact_relation_in_dt(const ItoSde& sde, int k, const std::optional<Rational>& dt = std::nullopt);

enum class ClosureStatus { ok, no_positive_root, degenerate };

const char* to_string(ClosureStatus s);

struct ClosureResult {
  ClosureStatus status = ClosureStatus::ok;
  double mu2 = 0.0;           // valid when status == ok
  bool in_validity_domain = false;  // mu2 < 0.1 sigma^2
  double c0 = 0.0;
  double c2 = 0.0;
  double c4 = 0.0;
};

/// Solves c0 + c2 mu2 + 3 c4 mu2^2 = 0, the k = 1 relation under the Gaussian
/// closure mu4 = 3 mu2^2, taking the positive root that vanishes with sigma.
/// `sde` may keep sigma symbolic; `sigma` is substituted. Status degenerate
/// when the mu4 coefficient vanishes (relative 1e-12).
ClosureResult gaussian_closure_solve(const ItoSde& sde, double sigma);

enum class DivergenceClass { all_positive, indeterminate };

const char* to_string(DivergenceClass c);

/// all_positive iff the constant is > 0, every moment coefficient is >= 0 and
/// one is > 0: no equilibrium with finite moments can satisfy the relation.
/// A nonzero odd-order coefficient makes the sign argument void
/// (indeterminate). Exact rational comparison; throws UnboundSymbol unless the
/// relation is numeric.
DivergenceClass divergence_classifier(const MomentRelation& relation);

/// c_0 + sum_j c_j mu_j in floating point. Throws MissingMoment / UnboundSymbol.
double relation_residual(const MomentRelation& relation, const MomentSequence& moments);

/// |residual| / (|c_0| + sum_j |c_j mu_j|).
double normalized_residual(const MomentRelation& relation, const MomentSequence& moments);

}  // namespace itolab
