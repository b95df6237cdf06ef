// Command-line front end: classify, decide, qe, stats, convert, fetch, batch, serve.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "econqe/batch.hpp"
#include "econqe/classifier.hpp"
#include "econqe/condition.hpp"
#include "econqe/corpus.hpp"
#include "econqe/service.hpp"
#include "econqe/smt2.hpp"
#include "econqe/stats.hpp"

namespace fs = std::filesystem;
using namespace econqe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnknown = 2;  // --strict and some result was Unknown

struct Globals {
  std::string solver_config;
  long timeout_ms = 60000;
  std::uint64_t seed = 0x5eed;
  bool json = false;
  std::size_t workers = 1;
  bool strict = false;
  std::string engine = "auto";
  std::string portfolio = "race";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

ClassifierOptions make_options(const Globals& g) {
  ClassifierOptions o;
  o.engine.deadline = std::chrono::milliseconds(g.timeout_ms);
  o.engine.seed = g.seed;
  o.mode = parse_engine_mode(g.engine);
  if (g.portfolio != "race" && g.portfolio != "sequential") throw Error("--portfolio must be race or sequential");
  o.portfolio = g.portfolio == "race" ? PortfolioMode::Race : PortfolioMode::Sequential;
  const auto config = solver_config_path(g.solver_config.empty() ? std::nullopt
                                                                 : std::optional<std::string>(g.solver_config));
  if (config) o.solvers = load_solver_config(*config);
  if (o.mode == EngineMode::External && o.solvers.empty()) {
    throw Error("--engine external needs --solver-config or $ECONQE_SOLVERS");
  }
  return o;
}

TheoremProblem load_problem(const std::string& path) {
  const std::string text = read_file(path);
  if (fs::path(path).extension() == ".json") return problem_from_json(nlohmann::json::parse(text));
  return parse_problem(text, fs::path(path).stem().string());
}

ExistsFormula pick_query(const QueryTrio& trio, const std::string& which) {
  if (which == "assumptions") return trio.assumptions;
  if (which == "example") return trio.example;
  if (which == "counterexample") return trio.counterexample;
  throw Error("--query must be assumptions, example or counterexample");
}

std::string point_text(const Point& p, const VariableTable& vars) {
  std::string out;
  for (const auto& [v, value] : p) out += (out.empty() ? "" : ", ") + vars.name(v) + " = " + to_string(value);
  return out;
}

void print_record(const char* name, const QueryRecord& r, const VariableTable& vars) {
  std::cout << "  " << name << ": " << to_string(r.verdict.status);
  if (!r.verdict.reason.empty()) std::cout << " (" << r.verdict.reason << ")";
  std::cout << " [" << r.engine << ", " << r.duration.count() << " ms]\n";
  if (r.verdict.witness) std::cout << "    point: " << point_text(*r.verdict.witness, vars) << "\n";
}

int cmd_classify(const Globals& g, const std::string& path) {
  const auto result = classify_theorem(load_problem(path), make_options(g));
  if (g.json) {
    std::cout << to_json(result).dump(2) << "\n";
  } else {
    std::cout << result.id << ": " << label(result.outcome.kind);
    if (!result.outcome.reason.empty()) std::cout << " (" << result.outcome.reason << ")";
    std::cout << "\n";
    print_record("assumptions", result.assumptions, result.vars);
    if (result.example) print_record("example", *result.example, result.vars);
    if (result.counterexample) print_record("counterexample", *result.counterexample, result.vars);
    for (const auto& w : result.warnings) std::cout << "  warning: " << w << "\n";
  }
  return g.strict && result.outcome.kind == Outcome::Kind::Unknown ? kExitUnknown : kExitOk;
}

int cmd_decide(const Globals& g, const std::string& path, const std::string& which) {
  ExistsFormula query;
  if (fs::path(path).extension() == ".smt2") {
    query = parse_smt2(read_file(path)).query;
  } else {
    query = pick_query(build_query_trio(load_problem(path)), which);
  }
  const auto r = run_query(query, make_options(g));
  if (g.json) {
    auto j = to_json(r.verdict, query.vars);
    j["engine"] = r.engine;
    j["millis"] = r.duration.count();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << to_string(r.verdict.status);
    if (!r.verdict.reason.empty()) std::cout << " (" << r.verdict.reason << ")";
    std::cout << "\n";
    if (r.verdict.witness) std::cout << point_text(*r.verdict.witness, query.vars) << "\n";
  }
  return g.strict && r.verdict.status == Status::Unknown ? kExitUnknown : kExitOk;
}

int cmd_qe(const Globals& g, const std::string& path, const std::vector<std::string>& free_names,
           const std::string& reference_text) {
  TheoremProblem problem = load_problem(path);
  std::vector<VarId> free = problem.free_vars;
  if (!free_names.empty()) {
    free.clear();
    for (const auto& n : free_names) free.push_back(problem.vars.at(n));
  }
  if (free.empty()) throw Error("qe needs --free v1,v2,... (or `free` in the model)");
  std::optional<Formula> reference;
  if (!reference_text.empty()) reference = parse_formula(reference_text, problem.vars);
  const auto c = derive_side_condition(problem, free, make_options(g), reference);
  if (g.json) {
    std::cout << to_json(c).dump(2) << "\n";
  } else {
    std::cout << to_text(c.condition, c.vars) << "\n";
    std::cout << "sufficiency check: " << to_string(c.sufficiency.verdict.status) << "\n";
    if (c.reference) std::cout << "reference check: " << to_string(c.reference->verdict.status) << "\n";
    std::cout << "equivalence checked: " << (c.equivalence_checked ? "yes" : "no") << "\n";
  }
  return g.strict && !c.equivalence_checked ? kExitUnknown : kExitOk;
}

int cmd_stats(const Globals& g, const std::string& dir, const std::string& out) {
  const auto index = index_corpus(dir);
  for (const auto& w : index.warnings) std::cerr << "warning: " << w << "\n";
  std::vector<ProblemStats> rows;
  for (const auto& e : index.entries) {
    if (!e.complete()) continue;
    rows.push_back(analyze_problem(e.id, load_trio(e).counterexample.matrix));
  }
  const auto report = aggregate(std::move(rows));
  write_output(out, g.json ? to_json(report).dump(2) + "\n" : to_csv(report));
  if (!g.json) {
    const auto j = to_json(report)["aggregates"];
    for (const auto& [metric, s] : j.items()) {
      std::cerr << metric << ": range (" << s["min"].get<std::string>() << ", " << s["max"].get<std::string>()
                << "), mean " << s["mean"].get<std::string>() << ", median " << s["median"].get<std::string>()
                << "\n";
    }
  }
  return kExitOk;
}

int cmd_convert(const std::string& path, const std::string& to, const std::string& which, const std::string& out) {
  ExistsFormula query;
  if (fs::path(path).extension() == ".smt2") {
    query = parse_smt2(read_file(path)).query;
  } else {
    query = pick_query(build_query_trio(load_problem(path)), which);
  }
  if (to == "smt2") {
    write_output(out, emit_smt2(query));
  } else if (to == "redlog") {
    write_output(out, emit_redlog(query));
  } else if (to == "maple") {
    write_output(out, emit_maple(query));
  } else {
    throw Error("--to must be smt2, redlog or maple");
  }
  return kExitOk;
}

int cmd_fetch(const Globals& g, const std::string& source, const std::string& dest) {
  const auto index = fetch_corpus(source, dest);
  if (g.json) {
    std::cout << to_json(index).dump(2) << "\n";
  } else {
    std::cout << "indexed " << index.entries.size() << " theorems (" << index.smt2_files << " query files) in "
              << index.root.string() << "\ndigest " << index.digest << "\n";
    for (const auto& w : index.warnings) std::cout << "warning: " << w << "\n";
  }
  return kExitOk;
}

int cmd_batch(const Globals& g, const std::string& dir, const std::string& out) {
  const auto index = index_corpus(dir);
  for (const auto& w : index.warnings) std::cerr << "warning: " << w << "\n";
  const auto manifest = batch_classify(index, make_options(g), g.workers);
  const auto j = to_json(manifest);
  if (!out.empty()) write_output(out, j.dump(2) + "\n");
  if (g.json && out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& row : manifest.rows) {
      std::cout << row.id << ": "
                << (row.result ? label(row.result->outcome.kind) : "Unknown")
                << (row.error.empty() ? "" : " (error: " + row.error + ")") << "\n";
    }
    std::cout << "summary:";
    for (const auto& [k, n] : manifest.outcome_counts()) std::cout << " " << k << "=" << n;
    std::cout << " counterexample_unsat=" << manifest.counterexample_count(Status::Unsat)
              << " errors=" << manifest.error_count() << " wall=" << manifest.wall.count() << "ms\n";
  }
  if (manifest.error_count() > 0) return kExitError;
  if (g.strict && manifest.outcome_counts().at("Unknown") > 0) return kExitUnknown;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decide candidate economic theorems over the reals"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Globals g;
  app.add_option("--solver-config", g.solver_config, "INI file of external solvers (default $ECONQE_SOLVERS)");
  app.add_option("--timeout", g.timeout_ms, "Per-query deadline in milliseconds")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for witness sampling");
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--workers", g.workers, "Parallel workers for batch")->check(CLI::PositiveNumber);
  app.add_flag("--strict", g.strict, "Exit with status 2 when a result is Unknown");
  app.add_option("--engine", g.engine, "builtin, external or auto")
      ->check(CLI::IsMember({"builtin", "external", "auto"}));
  app.add_option("--portfolio", g.portfolio, "race or sequential")->check(CLI::IsMember({"race", "sequential"}));

  std::string input, out, to = "smt2", which = "counterexample", reference, source = kCorpusDoi, dest = "corpus";
  std::string host = "127.0.0.1", corpus_dir;
  std::vector<std::string> free;
  int port = 8080;

  auto* classify = app.add_subcommand("classify", "Classify a theorem model (.econ or .json)");
  classify->add_option("model", input)->required();
  auto* decide = app.add_subcommand("decide", "Decide one existential query (.smt2, or a model with --query)");
  decide->add_option("input", input, "Query script or model")->required();
  decide->add_option("--query", which, "Query of a model to decide");
  auto* qe = app.add_subcommand("qe", "Side condition on free variables under which the theorem holds");
  qe->add_option("model", input)->required();
  qe->add_option("--free", free, "Free variables")->delimiter(',');
  qe->add_option("--reference", reference, "Reference condition (DSL) to check against");
  auto* stats = app.add_subcommand("stats", "Structural statistics of a corpus directory");
  stats->add_option("dir", input)->required();
  stats->add_option("--out", out, "Output file (default stdout)");
  auto* convert = app.add_subcommand("convert", "Convert a model or script to SMT-LIB, Redlog or Maple");
  convert->add_option("input", input)->required();
  convert->add_option("--to", to)->check(CLI::IsMember({"smt2", "redlog", "maple"}));
  convert->add_option("--query", which)->check(CLI::IsMember({"assumptions", "example", "counterexample"}));
  convert->add_option("--out", out);
  auto* fetch = app.add_subcommand("fetch", "Download or copy the benchmark corpus and index it");
  fetch->add_option("--source", source, "URL, DOI, directory or archive");
  fetch->add_option("--dest", dest, "Destination directory");
  auto* batch = app.add_subcommand("batch", "Classify every theorem of a corpus directory");
  batch->add_option("dir", input)->required();
  batch->add_option("--out", out, "Write the run manifest here");
  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API");
  serve_cmd->add_option("--port", port)->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--corpus", corpus_dir, "Corpus directory for /api/corpus");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify) return cmd_classify(g, input);
    if (*decide) return cmd_decide(g, input, which);
    if (*qe) return cmd_qe(g, input, free, reference);
    if (*stats) return cmd_stats(g, input, out);
    if (*convert) return cmd_convert(input, to, which, out);
    if (*fetch) return cmd_fetch(g, source, dest);
    if (*batch) return cmd_batch(g, input, out);
    if (*serve_cmd) {
      ServiceOptions options;
      options.classifier = make_options(g);
      if (!corpus_dir.empty()) options.corpus_root = corpus_dir;
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      serve(options, host, port);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
