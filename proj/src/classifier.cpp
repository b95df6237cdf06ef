#include "econqe/classifier.hpp"

#include <future>

#include "econqe/encoders.hpp"

namespace econqe {

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::milliseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
}

void check_witness(const std::optional<QueryRecord>& record, const ExistsFormula& query, QueryKind kind) {
  if (!record || !record->verdict.witness) return;
  if (!evaluate_at(query.matrix, *record->verdict.witness)) {
    throw InternalInconsistency(std::string(to_string(kind)) + " witness from " + record->engine +
                                " does not satisfy its query");
  }
}

}  // namespace

const char* to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::Assumptions: return "assumptions";
    case QueryKind::Example: return "example";
    case QueryKind::Counterexample: return "counterexample";
  }
  return "?";
}

const char* to_string(Outcome::Kind kind) {
  switch (kind) {
    case Outcome::Kind::TheoremTrue: return "TheoremTrue";
    case Outcome::Kind::TheoremFalse: return "TheoremFalse";
    case Outcome::Kind::Mixed: return "Mixed";
    case Outcome::Kind::ContradictoryAssumptions: return "ContradictoryAssumptions";
    case Outcome::Kind::Unknown: return "Unknown";
  }
  return "Unknown";
}

const char* label(Outcome::Kind kind) {
  switch (kind) {
    case Outcome::Kind::TheoremTrue: return "True";
    case Outcome::Kind::TheoremFalse: return "False";
    case Outcome::Kind::Mixed: return "Mixed";
    case Outcome::Kind::ContradictoryAssumptions: return "Contradictory";
    case Outcome::Kind::Unknown: return "Unknown";
  }
  return "Unknown";
}

Outcome interpret_pair(const Verdict& example, const Verdict& counterexample) {
  if (example.status == Status::Unknown) return Outcome::unknown(QueryKind::Example, example.reason);
  if (counterexample.status == Status::Unknown) {
    return Outcome::unknown(QueryKind::Counterexample, counterexample.reason);
  }
  const bool ex = example.status == Status::Sat;
  const bool cx = counterexample.status == Status::Sat;
  if (ex && !cx) return Outcome::of(Outcome::Kind::TheoremTrue);
  if (ex && cx) return Outcome::of(Outcome::Kind::Mixed);
  if (cx) return Outcome::of(Outcome::Kind::TheoremFalse);
  return Outcome::of(Outcome::Kind::ContradictoryAssumptions);
}

const char* to_string(EngineMode mode) {
  switch (mode) {
    case EngineMode::Builtin: return "builtin";
    case EngineMode::External: return "external";
    case EngineMode::Auto: return "auto";
  }
  return "auto";
}

EngineMode parse_engine_mode(const std::string& text) {
  if (text == "builtin") return EngineMode::Builtin;
  if (text == "external") return EngineMode::External;
  if (text == "auto") return EngineMode::Auto;
  throw Error("unknown engine '" + text + "' (expected builtin, external or auto)");
}

QueryRecord run_query(const ExistsFormula& query, const ClassifierOptions& options) {
  const auto start = Clock::now();
  QueryRecord record;
  if (options.mode != EngineMode::External) {
    record.verdict = decide_existential(query, options.engine);
    record.engine = "builtin";
    if (record.verdict.status != Status::Unknown || options.mode == EngineMode::Builtin ||
        options.solvers.empty()) {
      record.duration = since(start);
      return record;
    }
  }
  if (options.solvers.empty()) throw Error("external engine requested but no solvers are configured");
  const auto remaining = options.engine.deadline - since(start);
  const auto external =
      run_portfolio(query, options.solvers, options.portfolio, std::max(remaining, std::chrono::milliseconds(1)));
  if (external.verdict.status != Status::Unknown || record.engine.empty()) {
    record.verdict = external.verdict;
    record.engine = external.solver.empty() ? "external" : "external:" + external.solver;
  }
  record.duration = since(start);
  return record;
}

std::optional<Point> ClassificationResult::example_point() const {
  return example ? example->verdict.witness : std::nullopt;
}

std::optional<Point> ClassificationResult::counterexample_point() const {
  return counterexample ? counterexample->verdict.witness : std::nullopt;
}

ClassificationResult classify_theorem(const TheoremProblem& problem, const ClassifierOptions& options) {
  if (!problem.free_vars.empty()) {
    std::string names;
    for (VarId v : problem.free_vars) names += (names.empty() ? "" : ", ") + problem.vars.name(v);
    throw Error("free-variables-present: " + names + " (use qe for free-variable analysis)");
  }
  return classify_trio(problem.id, build_query_trio(problem), options);
}

ClassificationResult classify_trio(const std::string& id, const QueryTrio& trio, const ClassifierOptions& options) {
  ClassificationResult result;
  result.id = id;
  result.vars = trio.assumptions.vars;

  result.assumptions = run_query(trio.assumptions, options);
  check_witness(result.assumptions, trio.assumptions, QueryKind::Assumptions);
  const Status assumed = result.assumptions.verdict.status;
  if (assumed == Status::Unsat) {
    result.outcome = Outcome::of(Outcome::Kind::ContradictoryAssumptions);
    return result;
  }
  if (assumed == Status::Unknown) {
    result.warnings.push_back("assumptions undecided (" + result.assumptions.verdict.reason +
                              "); continuing with the example and counterexample queries");
  }

  if (options.parallel_queries) {
    auto pending = std::async(std::launch::async, [&] { return run_query(trio.counterexample, options); });
    result.example = run_query(trio.example, options);
    result.counterexample = pending.get();
  } else {
    result.example = run_query(trio.example, options);
    result.counterexample = run_query(trio.counterexample, options);
  }
  check_witness(result.example, trio.example, QueryKind::Example);
  check_witness(result.counterexample, trio.counterexample, QueryKind::Counterexample);

  const Status ex = result.example->verdict.status;
  const Status cx = result.counterexample->verdict.status;
  if (assumed == Status::Sat && ex == Status::Unsat && cx == Status::Unsat) {
    throw InternalInconsistency("internal-inconsistency: assumptions are satisfiable but neither A and H nor "
                                "A and not H is");
  }
  if (assumed == Status::Unknown && (ex == Status::Sat || cx == Status::Sat)) {
    result.warnings.push_back("assumptions are satisfiable (implied by a satisfiable example or counterexample)");
  }
  result.outcome = interpret_pair(result.example->verdict, result.counterexample->verdict);
  return result;
}

nlohmann::json to_json(const Verdict& verdict, const VariableTable& vars) {
  nlohmann::json out = {{"status", to_string(verdict.status)}};
  if (verdict.witness) {
    nlohmann::json point = nlohmann::json::object();
    for (const auto& [v, value] : *verdict.witness) point[vars.name(v)] = to_string(value);
    out["witness"] = std::move(point);
  }
  if (!verdict.reason.empty()) out["reason"] = verdict.reason;
  return out;
}

nlohmann::json to_json(const ClassificationResult& result) {
  auto record_json = [&](const QueryRecord& r) {
    nlohmann::json j = to_json(r.verdict, result.vars);
    j["engine"] = r.engine;
    j["millis"] = r.duration.count();
    return j;
  };
  nlohmann::json queries = {{"assumptions", record_json(result.assumptions)}};
  if (result.example) queries["example"] = record_json(*result.example);
  if (result.counterexample) queries["counterexample"] = record_json(*result.counterexample);
  nlohmann::json out = {{"id", result.id},
                        {"outcome", to_string(result.outcome.kind)},
                        {"label", label(result.outcome.kind)},
                        {"queries", std::move(queries)},
                        {"warnings", result.warnings}};
  if (!result.outcome.reason.empty()) out["reason"] = result.outcome.reason;
  return out;
}

}  // namespace econqe
