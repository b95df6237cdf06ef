#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "econqe/classifier.hpp"

namespace econqe {

/// Side condition on chosen free variables under which a theorem holds.
struct SideCondition {
  VariableTable vars;
  std::vector<VarId> free;
  /// φ(free) ≡ ∀ other variables (A ⇒ H), quantifier-free.
  Formula condition;
  /// ∃(A ∧ φ ∧ ¬H): UNSAT confirms that φ is sufficient.
  QueryRecord sufficiency;
  /// ∃(A ∧ σ ∧ ¬φ) for a supplied reference σ: UNSAT means σ implies φ under A.
  std::optional<QueryRecord> reference;
  /// Every check that was run came back UNSAT.
  bool equivalence_checked = false;
};

/// Eliminates the non-free variables from ∃(A ∧ ¬H) with virtual substitution
/// and negates the result, then runs the checks above with `options`.
/// Throws DegreeExceeded, DeadlineExceeded or ClauseCapExceeded from the
/// elimination, and econqe::Error for free variables not in the problem.
SideCondition derive_side_condition(const TheoremProblem& problem, const std::vector<VarId>& free,
                                    const ClassifierOptions& options,
                                    const std::optional<Formula>& reference = std::nullopt);

/// {free, formula_dsl, equivalence_checked, checks:{sufficiency, reference?}}.
nlohmann::json to_json(const SideCondition& condition);

}  // namespace econqe
