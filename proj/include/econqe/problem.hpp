#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "econqe/formula.hpp"

namespace econqe {

/// A candidate theorem ∀v . A(v) ⇒ H(v), possibly with variables left free.
struct TheoremProblem {
  std::string id;
  VariableTable vars;
  Formula assumptions;
  Formula hypothesis;
  /// Sorted, duplicate-free.
  std::vector<VarId> free_vars;
  std::map<std::string, std::string> metadata;
};

/// Parses the `.econ` DSL:
///
///   problem "name"            (optional)
///   vars v1 v2 v3 v4
///   free v1                   (optional; must already be declared)
///   order v4 v3 v2 v1         (optional permutation of all variables)
///   meta source "textbook"    (optional key/value)
///   assume v1 < 0 and v2 > 0 and v3*v2 - 1 = v4 and v4 = v3*v1
///   hypothesis v3 > 0 and v4 < 0
///
/// Formulas use `and`, `or`, `not`, `implies`, `true`, `false`, parentheses and
/// relation chains (a < b < c). Polynomials use + - * / ^ over identifiers and
/// rational literals; division is only allowed by nonzero constants.
/// Intrinsics `gram_psd(a, b, ...)` and `nsd_minors(n, f11, f12, ...)` expand
/// to their generated conjunctions and declare missing variables.
///
/// Statements may be separated by `;`. `#` starts a comment.
/// Throws ParseError (with line and column) on malformed input.
TheoremProblem parse_problem(std::string_view text, std::string default_id = "problem");

/// Parses a single formula against an existing table (no new declarations,
/// except variables introduced by intrinsics).
Formula parse_formula(std::string_view text, VariableTable& vars);

/// Canonical DSL text; parse_problem(to_dsl(p)) reproduces p.
std::string to_dsl(const TheoremProblem& problem);

nlohmann::json to_json(const TheoremProblem& problem);
/// Accepts {id, vars, free?, order?, assume, hypothesis, metadata?} or {dsl}.
TheoremProblem problem_from_json(const nlohmann::json& doc);

}  // namespace econqe
