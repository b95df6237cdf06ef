#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "econqe/decision.hpp"
#include "econqe/encoders.hpp"
#include "econqe/error.hpp"
#include "econqe/portfolio.hpp"
#include "econqe/problem.hpp"

namespace econqe {

/// Logically impossible verdict combination, e.g. A satisfiable while both
/// A ∧ H and A ∧ ¬H are not. Signals an engine bug, never a property of input.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

enum class QueryKind { Assumptions, Example, Counterexample };
const char* to_string(QueryKind kind);

struct Outcome {
  enum class Kind { TheoremTrue, TheoremFalse, Mixed, ContradictoryAssumptions, Unknown };
  Kind kind = Kind::Unknown;
  /// For Unknown: "<query>: <reason>", e.g. "example: timeout".
  std::string reason;

  static Outcome of(Kind kind) { return {kind, {}}; }
  static Outcome unknown(QueryKind query, const std::string& reason) {
    return {Kind::Unknown, std::string(to_string(query)) + ": " + reason};
  }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// "TheoremTrue", "TheoremFalse", "Mixed", "ContradictoryAssumptions", "Unknown".
const char* to_string(Outcome::Kind kind);
/// Short label: "True", "False", "Mixed", "Contradictory", "Unknown".
const char* label(Outcome::Kind kind);

/// Maps the example/counterexample verdict pair to an outcome. The first
/// UNKNOWN query (example before counterexample) is named in the reason.
Outcome interpret_pair(const Verdict& example, const Verdict& counterexample);

enum class EngineMode { Builtin, External, Auto };
const char* to_string(EngineMode mode);
/// Throws econqe::Error for anything but builtin, external or auto.
EngineMode parse_engine_mode(const std::string& text);

struct ClassifierOptions {
  EngineConfig engine;
  /// Auto: builtin first, then the external solvers when it answers UNKNOWN.
  EngineMode mode = EngineMode::Auto;
  std::vector<SolverSpec> solvers;
  PortfolioMode portfolio = PortfolioMode::Race;
  /// Run the example and counterexample queries on two threads.
  bool parallel_queries = false;
};

struct QueryRecord {
  Verdict verdict;
  /// "builtin" or "external:<solver>".
  std::string engine;
  std::chrono::milliseconds duration{0};
};

struct ClassificationResult {
  std::string id;
  VariableTable vars;
  Outcome outcome;
  QueryRecord assumptions;
  /// Absent when the assumptions query was UNSAT.
  std::optional<QueryRecord> example;
  std::optional<QueryRecord> counterexample;
  std::vector<std::string> warnings;

  std::optional<Point> example_point() const;
  std::optional<Point> counterexample_point() const;
};

/// Runs one existential query with the configured engines.
QueryRecord run_query(const ExistsFormula& query, const ClassifierOptions& options);

/// Assumptions query first (UNSAT short-circuits to ContradictoryAssumptions),
/// then the example and counterexample queries and interpret_pair.
/// Throws Error("free-variables-present ...") when the problem has free
/// variables, and InternalInconsistency on impossible verdict combinations.
ClassificationResult classify_theorem(const TheoremProblem& problem, const ClassifierOptions& options);

/// classify_theorem for queries given directly (e.g. three SMT-LIB scripts).
/// All three queries must share one variable table.
ClassificationResult classify_trio(const std::string& id, const QueryTrio& trio, const ClassifierOptions& options);

/// {id, outcome, label, reason?, queries:{assumptions, example?, counterexample?:
///   {status, witness?, engine, millis, reason?}}, warnings[]}
/// Witness values are exact rationals as strings ("-1/2").
nlohmann::json to_json(const ClassificationResult& result);
nlohmann::json to_json(const Verdict& verdict, const VariableTable& vars);

}  // namespace econqe
