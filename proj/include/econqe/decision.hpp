#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "econqe/formula.hpp"

namespace econqe {

enum class Status { Sat, Unsat, Unknown };
const char* to_string(Status status);

/// Answer to an existential query. A witness is only present for SAT answers
/// and always satisfies the query's matrix.
struct Verdict {
  Status status = Status::Unknown;
  std::optional<Point> witness;
  /// Why the answer is UNKNOWN ("vs-degree-exceeded", "timeout", "clause-cap",
  /// ...), or a note such as "unvalidated-model" on SAT answers.
  std::string reason;

  static Verdict sat(std::optional<Point> witness = std::nullopt) { return {Status::Sat, std::move(witness), {}}; }
  static Verdict unsat() { return {Status::Unsat, std::nullopt, {}}; }
  static Verdict unknown(std::string reason) { return {Status::Unknown, std::nullopt, std::move(reason)}; }
};

struct EngineConfig {
  /// Witness-search rounds; each round tries every DNF clause once.
  std::size_t sample_count = 64;
  std::uint64_t seed = 0x5eed;
  std::size_t clause_cap = kDefaultClauseCap;
  std::chrono::milliseconds deadline{60000};
  /// Fixed elimination order for the VS stage; otherwise chosen per clause.
  std::optional<std::vector<VarId>> order;

  static constexpr unsigned kMaxVsDegree = 2;
};

/// (constant + sqrt_coefficient·√radicand) / denominator, all polynomials in
/// the variables that remain after elimination.
struct RootExpression {
  Polynomial constant;
  Polynomial sqrt_coefficient;
  Polynomial radicand;
  Polynomial denominator{1};

  friend bool operator==(const RootExpression&, const RootExpression&) = default;
};

/// Member of a virtual-substitution elimination set.
struct TestPoint {
  enum class Kind { MinusInfinity, EpsilonAbove, ExactRoot };
  Kind kind = Kind::MinusInfinity;
  RootExpression root;  // unused for MinusInfinity
  /// Conditions under which the root expression denotes a real root.
  Formula guard;
};

/// Elimination set of `f` (any quantifier-free formula) for `x`.
/// Throws DegreeExceeded if some atom has degree above 2 in x.
std::vector<TestPoint> elimination_set(const Formula& f, VarId x);
/// f[x := tp] as a quantifier-free formula without x (guard not included).
Formula substitute(const Formula& f, VarId x, const TestPoint& tp);

/// Quantifier-free formula equivalent to ∃x f over the reals.
/// Throws DegreeExceeded naming the offending atom.
Formula vs_eliminate_var(const Formula& f, VarId x, const VariableTable* names = nullptr);

/// Sampling-based search for a satisfying rational point. Never answers UNSAT.
Verdict witness_search(const ExistsFormula& query, const EngineConfig& cfg);

/// The suggested order restricted to `quantified` when present; else ascending
/// by (max degree in f, number of atoms containing the variable, index).
std::vector<VarId> choose_elimination_order(const Formula& f, const std::vector<VarId>& quantified,
                                            const std::optional<std::vector<VarId>>& suggested = std::nullopt);

/// One existential sub-problem per DNF clause, each quantifying only the
/// bound variables that occur in its clause.
std::vector<ExistsFormula> distribute_exists_over_dnf(const ExistsFormula& query,
                                                      std::size_t clause_cap = kDefaultClauseCap);

/// Witness search, then clause-wise virtual substitution. Failures surface as
/// UNKNOWN with a reason; never throws for engine limits.
Verdict decide_existential(const ExistsFormula& query, const EngineConfig& cfg);

/// Quantifier-free formula over the free variables equivalent to the query.
/// Throws DegreeExceeded, DeadlineExceeded or ClauseCapExceeded.
Formula qe_free(const ExistsFormula& query, const EngineConfig& cfg);

}  // namespace econqe
