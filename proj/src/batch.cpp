#include "econqe/batch.hpp"

#include <atomic>
#include <cstdio>
#include <thread>

namespace econqe {

namespace {

using Clock = std::chrono::steady_clock;

std::string first_line_of(const std::string& command) {
  FILE* pipe = ::popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe) return "unavailable";
  char buf[256] = {0};
  std::string line = std::fgets(buf, sizeof buf, pipe) ? buf : "";
  ::pclose(pipe);
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
  return line.empty() ? "unavailable" : line;
}

std::string solver_version(const SolverSpec& spec) {
  const std::string program = spec.command.substr(0, spec.command.find(' '));
  return first_line_of(program + " --version");
}

}  // namespace

std::map<std::string, std::size_t> RunManifest::outcome_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const char* k : {"TheoremTrue", "TheoremFalse", "Mixed", "ContradictoryAssumptions", "Unknown"}) counts[k] = 0;
  for (const auto& row : rows) {
    ++counts[row.result ? to_string(row.result->outcome.kind) : "Unknown"];
  }
  return counts;
}

std::size_t RunManifest::counterexample_count(Status status) const {
  std::size_t n = 0;
  for (const auto& row : rows) {
    if (row.result && row.result->counterexample && row.result->counterexample->verdict.status == status) ++n;
  }
  return n;
}

std::size_t RunManifest::error_count() const {
  std::size_t n = 0;
  for (const auto& row : rows) n += !row.error.empty();
  return n;
}

RunManifest batch_classify(const CorpusIndex& index, const ClassifierOptions& options, std::size_t workers) {
  RunManifest manifest;
  manifest.options = options;
  manifest.workers = std::max<std::size_t>(1, workers);
  manifest.corpus_root = index.root.string();
  manifest.corpus_digest = index.digest;
  manifest.tool_versions["econqe"] = kVersion;
  for (const auto& s : options.solvers) manifest.tool_versions[s.name] = solver_version(s);

  std::vector<const CorpusEntry*> todo;
  for (const auto& e : index.entries) {
    if (e.complete()) todo.push_back(&e);
  }
  manifest.rows.resize(todo.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      BatchRow& row = manifest.rows[i];
      row.id = todo[i]->id;
      try {
        row.result = classify_trio(row.id, load_trio(*todo[i]), options);
      } catch (const std::exception& e) {
        row.result.reset();
        row.error = e.what();
      }
    }
  };
  const auto start = Clock::now();
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(manifest.workers, todo.size()); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  manifest.wall = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  return manifest;
}

nlohmann::json to_json(const ClassifierOptions& options) {
  nlohmann::json solvers = nlohmann::json::array();
  for (const auto& s : options.solvers) {
    solvers.push_back({{"name", s.name},
                       {"cmd", s.command},
                       {"timeout_ms", s.timeout.count()},
                       {"parses_model", s.parses_model}});
  }
  return {{"engine", to_string(options.mode)},
          {"deadline_ms", options.engine.deadline.count()},
          {"seed", options.engine.seed},
          {"sample_count", options.engine.sample_count},
          {"clause_cap", options.engine.clause_cap},
          {"portfolio", options.portfolio == PortfolioMode::Race ? "race" : "sequential"},
          {"solvers", std::move(solvers)}};
}

nlohmann::json to_json(const RunManifest& manifest) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : manifest.rows) {
    if (row.result) {
      rows.push_back(to_json(*row.result));
    } else {
      rows.push_back({{"id", row.id},
                      {"outcome", "Unknown"},
                      {"label", "Unknown"},
                      {"reason", "error: " + row.error},
                      {"error", row.error},
                      {"queries", nlohmann::json::object()},
                      {"warnings", nlohmann::json::array()}});
    }
  }
  nlohmann::json config = to_json(manifest.options);
  config["workers"] = manifest.workers;
  return {{"schema_version", kManifestSchemaVersion},
          {"tool_versions", manifest.tool_versions},
          {"config", std::move(config)},
          {"corpus", {{"root", manifest.corpus_root}, {"digest", manifest.corpus_digest}}},
          {"rows", std::move(rows)},
          {"summary",
           {{"problems", manifest.rows.size()},
            {"outcomes", manifest.outcome_counts()},
            {"counterexample_unsat", manifest.counterexample_count(Status::Unsat)},
            {"counterexample_sat", manifest.counterexample_count(Status::Sat)},
            {"errors", manifest.error_count()}}},
          {"wall_millis", manifest.wall.count()}};
}

nlohmann::json without_timings(nlohmann::json manifest) {
  manifest.erase("wall_millis");
  if (manifest.contains("config")) manifest["config"].erase("workers");
  for (auto& row : manifest["rows"]) {
    for (auto& [name, q] : row["queries"].items()) q.erase("millis");
  }
  return manifest;
}

}  // namespace econqe
