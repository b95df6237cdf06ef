#pragma once

#include <optional>
#include <vector>

#include "econqe/decision.hpp"

namespace econqe::detail {

/// One disjunct of ∃x C for a clause C. With `point` set, `formula` is
/// guard ∧ C[x := point] and no longer mentions x; without it, `formula` is a
/// residual clause that still contains x (the vanishing-coefficient case of
/// an equation used as a Gauss pivot).
struct Branch {
  Formula formula;
  std::optional<TestPoint> point;
};

/// Branches whose disjunction is equivalent to ∃x clause.
/// Throws DegreeExceeded if an atom containing x has degree above 2 in x.
std::vector<Branch> clause_branches(const std::vector<Atom>& clause, VarId x, const VariableTable* names);

/// Next variable to eliminate from `clause` among `candidates`, skipping those
/// with degree above the VS bound. nullopt when every candidate is too high.
std::optional<VarId> pick_variable(const std::vector<Atom>& clause, const std::vector<VarId>& candidates,
                                   const std::optional<std::vector<VarId>>& order);

/// Rational value of the root expression at `point`, if it is rational.
std::optional<Rational> root_value(const RootExpression& root, const Point& point);

/// Exact rational square root, if one exists.
std::optional<Rational> rational_sqrt(const Rational& value);

}  // namespace econqe::detail
