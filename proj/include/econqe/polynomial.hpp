#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace econqe {

using Integer = mpz_class;
using Rational = mpq_class;
using VarId = std::uint32_t;

/// Exact assignment of rational values to variables.
using Point = std::map<VarId, Rational>;

/// Parses "3", "-1/2", "0.25", "1e-3" exactly. Throws econqe::Error on junk.
Rational parse_rational(const std::string& text);
/// "p/q" or "p"; always exact.
std::string to_string(const Rational& value);
std::size_t hash_value(const Rational& value);

/// Power product of variables, stored as (variable, exponent) pairs sorted by
/// variable index with positive exponents only.
class Monomial {
 public:
  using Factor = std::pair<VarId, unsigned>;

  Monomial() = default;
  static Monomial variable(VarId var, unsigned exponent = 1);
  static Monomial from_factors(std::vector<Factor> factors);

  std::span<const Factor> factors() const noexcept { return factors_; }
  unsigned total_degree() const noexcept { return total_; }
  unsigned degree_in(VarId var) const noexcept;
  bool is_one() const noexcept { return factors_.empty(); }

  /// This monomial with `var` removed.
  Monomial without(VarId var) const;

  friend Monomial operator*(const Monomial& lhs, const Monomial& rhs);
  friend bool operator==(const Monomial& lhs, const Monomial& rhs) = default;
  /// Graded lexicographic order by variable index.
  friend std::strong_ordering operator<=>(const Monomial& lhs, const Monomial& rhs);

  std::size_t hash() const noexcept;

 private:
  std::vector<Factor> factors_;
  unsigned total_ = 0;
};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in strictly decreasing graded-lex order with no zero
/// coefficients, so structural equality is mathematical equality.
class Polynomial {
 public:
  struct Term {
    Monomial monomial;
    Rational coefficient;
    friend bool operator==(const Term&, const Term&) = default;
  };

  Polynomial() = default;
  Polynomial(const Rational& constant);  // NOLINT: implicit by design of the algebra
  Polynomial(long constant) : Polynomial(Rational(constant)) {}  // NOLINT
  Polynomial(int constant) : Polynomial(Rational(constant)) {}   // NOLINT
  static Polynomial variable(VarId var);
  static Polynomial monomial(const Monomial& mono, const Rational& coefficient);
  /// Builds from arbitrary terms; merges like monomials and drops zeros.
  static Polynomial from_terms(std::vector<Term> terms);

  std::span<const Term> terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  /// Constant term when is_constant(), else throws.
  Rational constant_value() const;
  Rational constant_term() const;

  unsigned total_degree() const noexcept;
  unsigned degree_in(VarId var) const noexcept;
  std::vector<VarId> variables() const;
  bool contains(VarId var) const noexcept { return degree_in(var) > 0; }

  /// Leading (grlex-greatest) coefficient; zero for the zero polynomial.
  Rational leading_coefficient() const;
  /// Positive rational c such that p / c has coprime integer coefficients;
  /// zero for the zero polynomial.
  Rational content() const;

  /// Coefficients of `var`: result[k] is the coefficient of var^k.
  std::vector<Polynomial> coefficients_in(VarId var) const;
  Polynomial derivative(VarId var) const;
  Polynomial substitute(VarId var, const Polynomial& value) const;
  /// Substitutes every variable bound in `point`; others stay symbolic.
  Polynomial partial_evaluate(const Point& point) const;
  /// Throws econqe::Error if some variable is unassigned.
  Rational evaluate(const Point& point) const;

  Polynomial pow(unsigned exponent) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
  Polynomial scaled(const Rational& factor) const;

  friend bool operator==(const Polynomial& lhs, const Polynomial& rhs) = default;
  /// Total order used for deterministic containers; not an algebraic order.
  friend std::strong_ordering operator<=>(const Polynomial& lhs, const Polynomial& rhs);

  std::size_t hash() const noexcept;

  /// Human-readable form, e.g. "v3*v2 - v4 - 1", using `names[var]`.
  std::string to_string(const std::vector<std::string>& names) const;

 private:
  std::vector<Term> terms_;
};

}  // namespace econqe

template <>
struct std::hash<econqe::Polynomial> {
  std::size_t operator()(const econqe::Polynomial& p) const noexcept { return p.hash(); }
};
