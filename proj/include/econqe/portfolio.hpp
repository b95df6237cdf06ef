#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "econqe/decision.hpp"

namespace econqe {

/// One external solver. `command` is run through /bin/sh with `{file}`
/// replaced by the (shell-quoted) path of the SMT-LIB script.
struct SolverSpec {
  std::string name;
  std::string command;
  std::chrono::milliseconds timeout{60000};
  bool parses_model = true;
};

/// Reads an INI file with one section per solver:
///
///   [z3]
///   cmd = z3 -smt2 {file}
///   timeout_ms = 60000
///   parses_model = true
///
/// Throws econqe::Error on unreadable files, missing keys, or commands
/// without exactly one {file}.
std::vector<SolverSpec> load_solver_config(const std::string& path);

/// `explicit_path` if given, else $ECONQE_SOLVERS, else nothing.
std::optional<std::string> solver_config_path(const std::optional<std::string>& explicit_path = std::nullopt);

struct ExternalResult {
  std::string solver;
  Status status = Status::Unknown;
  std::optional<std::string> model_text;
  std::optional<Point> witness;
  /// Why the lane is UNKNOWN, or a note on SAT ("unvalidated-model").
  std::string reason;
  std::string stderr_excerpt;
  std::chrono::milliseconds duration{0};
};

enum class PortfolioMode { Sequential, Race };

struct PortfolioResult {
  Verdict verdict;
  /// Solver that produced the verdict; empty when every lane was UNKNOWN.
  std::string solver;
  std::vector<ExternalResult> lanes;
};

/// Runs `solvers` on the query (all variables are existential in the script).
/// The first SAT/UNSAT answer wins; in race mode the remaining processes are
/// terminated. SAT models are validated exactly; a model that does not satisfy
/// the matrix demotes the lane to UNKNOWN("model-validation-failed").
/// `deadline` caps every lane's timeout when set.
PortfolioResult run_portfolio(const ExistsFormula& query, const std::vector<SolverSpec>& solvers,
                              PortfolioMode mode = PortfolioMode::Race,
                              std::optional<std::chrono::milliseconds> deadline = std::nullopt);

}  // namespace econqe
