#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "econqe/polynomial.hpp"

namespace econqe {

/// Ordered set of named real variables; a variable's id is its position.
class VariableTable {
 public:
  VariableTable() = default;
  explicit VariableTable(const std::vector<std::string>& names);

  /// Appends a new variable. Throws if the name is already taken.
  VarId add(const std::string& name);
  /// Returns the id of `name`, adding it if absent.
  VarId intern(const std::string& name);
  std::optional<VarId> find(const std::string& name) const;
  /// Throws econqe::Error for unknown names.
  VarId at(const std::string& name) const;

  const std::string& name(VarId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }

  const std::optional<std::vector<VarId>>& suggested_order() const noexcept { return order_; }
  /// Throws unless `order` is a permutation of all ids.
  void set_suggested_order(std::vector<VarId> order);

  friend bool operator==(const VariableTable& a, const VariableTable& b) {
    return a.names_ == b.names_ && a.order_ == b.order_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> index_;
  std::optional<std::vector<VarId>> order_;
};

/// Relation of an atom's polynomial against zero.
enum class Rel : std::uint8_t { Lt, Le, Eq, Ne, Ge, Gt };

/// Relation satisfied exactly when `rel` is not.
Rel negate(Rel rel);
/// Relation r' with (-p r' 0) <=> (p rel 0).
Rel mirror(Rel rel);
const char* symbol(Rel rel);

/// Sign set bits: negative, zero, positive.
using SignSet = std::uint8_t;
inline constexpr SignSet kNegative = 1;
inline constexpr SignSet kZero = 2;
inline constexpr SignSet kPositive = 4;
SignSet signs_of(Rel rel);
/// Inverse of signs_of for the six non-trivial sets.
std::optional<Rel> rel_of(SignSet signs);
bool holds(Rel rel, int sign);

/// Canonical sign condition `lhs rel 0`: lhs is a primitive integer polynomial
/// with positive leading coefficient and is never constant.
struct Atom {
  Polynomial lhs;
  Rel rel;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
    if (auto c = a.lhs <=> b.lhs; c != 0) return c;
    return a.rel <=> b.rel;
  }
};

/// Immutable Boolean combination of atoms. Cheap to copy (shared nodes).
class Formula {
 public:
  enum class Kind : std::uint8_t { True, False, Atom, Not, And, Or };

  Formula();  // TrueConst
  static Formula truth();
  static Formula falsity();
  static Formula constant(bool value) { return value ? truth() : falsity(); }
  /// Canonicalizes `p rel 0`; constant `p` folds to TrueConst/FalseConst.
  static Formula atom(const Polynomial& p, Rel rel);
  /// Wraps an already-canonical atom.
  static Formula of(const Atom& atom);
  static Formula negation(const Formula& child);
  /// Flattens nested conjunctions and folds constants.
  static Formula conj(std::vector<Formula> children);
  static Formula disj(std::vector<Formula> children);
  static Formula implies(const Formula& lhs, const Formula& rhs);

  Kind kind() const noexcept;
  bool is_true() const noexcept { return kind() == Kind::True; }
  bool is_false() const noexcept { return kind() == Kind::False; }
  const Atom& as_atom() const;
  std::span<const Formula> children() const noexcept;

  std::size_t hash() const noexcept;
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Canonical form of `p rel 0`, or the truth value when p is constant.
std::variant<Atom, bool> canonical_atom(const Polynomial& p, Rel rel);

/// Existentially quantified formula: ∃ bound . matrix. Variables of the
/// matrix outside `bound` are free.
struct ExistsFormula {
  VariableTable vars;
  std::vector<VarId> bound;
  Formula matrix;
};

/// Negations pushed onto atoms and absorbed into relations; no Not nodes remain.
Formula to_nnf(const Formula& f);

/// Conjunction of atoms, sorted and duplicate-free.
using Clause = std::vector<Atom>;
inline constexpr std::size_t kDefaultClauseCap = 100000;

/// DNF of `f`. Clauses holding two atoms on the same polynomial with disjoint
/// sign sets are dropped; duplicate clauses keep their first position.
/// Throws ClauseCapExceeded when more than `max_clauses` would be produced.
std::vector<Clause> to_dnf(const Formula& f, std::size_t max_clauses = kDefaultClauseCap);
Formula from_clause(const Clause& clause);
Formula from_dnf(const std::vector<Clause>& clauses);

/// Exact truth value. Throws econqe::Error when a needed variable is unassigned.
bool evaluate_at(const Formula& f, const Point& point);
bool evaluate_at(const Clause& clause, const Point& point);

/// Shallow equivalence-preserving cleanup: constant folding, flattening,
/// duplicate removal, and merging of sign conditions on the same polynomial
/// inside a conjunction or disjunction. Result is in NNF.
Formula simplify(const Formula& f);
/// Merges atoms on the same polynomial by sign-set intersection; nullopt when
/// the clause is contradictory.
std::optional<Clause> merge_clause(const Clause& clause);

/// Every atom of `f` in depth-first order (with repetitions).
std::vector<Atom> atoms_of(const Formula& f);
std::vector<VarId> variables_of(const Formula& f);
std::vector<VarId> variables_of(const Clause& clause);

struct FormulaMetrics {
  std::size_t atom_count = 0;
  std::size_t polynomial_count = 0;
  std::size_t variable_count = 0;
  unsigned max_total_degree = 0;
  Rational mean_total_degree = 0;
  /// Highest degree of each occurring variable, keyed by id.
  std::map<VarId, unsigned> max_degree_per_variable;
  unsigned max_variable_degree = 0;
};
FormulaMetrics formula_metrics(const Formula& f);

/// Text form used by the DSL, e.g. "v1 < 0 and (v3 <= 0 or v4 >= 0)".
std::string to_text(const Formula& f, const VariableTable& vars);
std::string to_text(const Atom& atom, const VariableTable& vars);

}  // namespace econqe

template <>
struct std::hash<econqe::Formula> {
  std::size_t operator()(const econqe::Formula& f) const noexcept { return f.hash(); }
};
