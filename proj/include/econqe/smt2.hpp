#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "econqe/formula.hpp"

namespace econqe {

struct Smt2EmitOptions {
  std::string logic = "QF_NRA";
  bool get_model = true;
};

/// Deterministic SMT-LIB 2 script for ∃vars . matrix: every variable of the
/// table is declared as a Real constant, in table order. Free variables are
/// declared like bound ones; the caller decides what SAT means for them.
std::string emit_smt2(const ExistsFormula& query, const Smt2EmitOptions& options = {});

/// SMT-LIB symbol for `name`, quoted with |...| when it is not a simple symbol.
std::string smt2_symbol(const std::string& name);

struct Smt2Script {
  ExistsFormula query;  // every declared constant is bound
  std::optional<std::string> logic;
  std::map<std::string, std::string> info;
  bool check_sat = false;
  bool get_model = false;
};

/// Parses the QF_NRA subset: declare-fun/declare-const of sort Real, nullary
/// define-fun, assert (all conjoined), set-logic, set-info, set-option,
/// check-sat, get-model, exit. Terms: let, and, or, not, =>, true, false, =,
/// distinct, <, <=, >, >= (chainable), +, -, *, and / by a constant.
/// Throws ParseError naming the unsupported construct and its position.
///
/// A suggested elimination order may be given as
///   (set-info :variable-order "v4 v3 v2 v1")
/// and is applied when it is a permutation of the declared constants.
Smt2Script parse_smt2(std::string_view text);
/// As above, starting from `base`: constants already in the table keep their
/// ids and new ones are appended. Lets the three scripts of one theorem share
/// a table. `query.bound` lists only the constants this script declares.
Smt2Script parse_smt2(std::string_view text, const VariableTable& base);

/// Values parsed from a solver's `(get-model)` answer.
struct Smt2Model {
  Point point;
  /// Some value was an algebraic number (root-obj, "?"-suffixed decimal) and
  /// could not be read exactly; such models cannot be validated.
  bool algebraic = false;
};

/// Reads define-fun entries of a model (with or without the `model` keyword).
/// Names unknown to `vars` are ignored. Throws ParseError on malformed text.
Smt2Model parse_smt2_model(std::string_view text, const VariableTable& vars);

/// Best-effort Redlog input (rlqe/rlex) for the query; no parser exists.
std::string emit_redlog(const ExistsFormula& query);
/// Best-effort Maple input using the QuantifierElimination package.
std::string emit_maple(const ExistsFormula& query);

}  // namespace econqe
