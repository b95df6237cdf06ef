#include "econqe/service.hpp"

#include <ctime>

#include <httplib.h>

#include "econqe/condition.hpp"
#include "econqe/smt2.hpp"

namespace econqe {

namespace {

using Response = Service::Response;

Response error_response(int status, const std::string& message, nlohmann::json extra = nlohmann::json::object()) {
  extra["error"] = message;
  return {status, std::move(extra)};
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

TheoremProblem problem_of(const nlohmann::json& request) {
  if (request.contains("problem")) return problem_from_json(request.at("problem"));
  return problem_from_json(request);
}

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  if (options_.corpus_root) index_ = index_corpus(*options_.corpus_root);
}

Response Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  try {
    if (path == "/api/history") {
      if (method == "GET") return {200, history()};
      if (method == "DELETE") {
        std::lock_guard lock(history_mutex_);
        const std::size_t n = history_.size();
        history_ = nlohmann::json::array();
        return {200, {{"cleared", n}}};
      }
      return error_response(405, "method not allowed");
    }
    if (path == "/api/corpus" || path.rfind("/api/corpus/", 0) == 0) {
      if (method != "GET") return error_response(405, "method not allowed");
      return corpus(path.size() > 12 ? path.substr(12) : "");
    }
    const bool known = path == "/api/classify" || path == "/api/qe" || path == "/api/decide";
    if (!known) return error_response(404, "no route for " + path);
    if (method != "POST") return error_response(405, "method not allowed");

    nlohmann::json request;
    try {
      request = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      return error_response(400, std::string("malformed JSON: ") + e.what());
    }
    if (!request.is_object()) return error_response(400, "request body must be a JSON object");
    Response response;
    try {
      if (path == "/api/classify") response = classify(request);
      if (path == "/api/qe") response = qe(request);
      if (path == "/api/decide") response = decide(request);
    } catch (const ParseError& e) {
      response = error_response(400, e.what(), {{"line", e.line()}, {"column", e.column()}});
    } catch (const DegreeExceeded& e) {
      response = error_response(422, e.what(), {{"reason", "vs-degree-exceeded"}});
    } catch (const DeadlineExceeded& e) {
      response = error_response(422, e.what(), {{"reason", "timeout"}});
    } catch (const ClauseCapExceeded& e) {
      response = error_response(422, e.what(), {{"reason", "clause-cap"}});
    } catch (const InternalInconsistency& e) {
      response = error_response(500, e.what(), {{"reason", "internal-inconsistency"}});
    } catch (const Error& e) {
      response = error_response(422, e.what());
    } catch (const nlohmann::json::exception& e) {
      response = error_response(400, std::string("bad request: ") + e.what());
    }
    record(path, request, response);
    return response;
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

Response Service::classify(const nlohmann::json& request) {
  const TheoremProblem problem = problem_of(request);
  return {200, to_json(classify_theorem(problem, options_.classifier))};
}

Response Service::qe(const nlohmann::json& request) {
  TheoremProblem problem = problem_of(request);
  std::vector<VarId> free = problem.free_vars;
  if (request.contains("free")) {
    free.clear();
    for (const auto& name : request.at("free")) {
      const auto id = problem.vars.find(name.get<std::string>());
      if (!id) return error_response(422, "unknown variable '" + name.get<std::string>() + "'");
      free.push_back(*id);
    }
  }
  if (free.empty()) return error_response(422, "no free variables selected");
  std::optional<Formula> reference;
  if (request.contains("reference")) reference = parse_formula(request.at("reference").get<std::string>(), problem.vars);
  return {200, to_json(derive_side_condition(problem, free, options_.classifier, reference))};
}

Response Service::decide(const nlohmann::json& request) {
  ExistsFormula query;
  if (request.contains("smt2")) {
    query = parse_smt2(request.at("smt2").get<std::string>()).query;
  } else {
    query.vars = VariableTable(request.at("vars").get<std::vector<std::string>>());
    query.matrix = parse_formula(request.at("formula").get<std::string>(), query.vars);
    for (VarId v = 0; v < query.vars.size(); ++v) query.bound.push_back(v);
  }
  const QueryRecord r = run_query(query, options_.classifier);
  nlohmann::json out = to_json(r.verdict, query.vars);
  out["engine"] = r.engine;
  out["millis"] = r.duration.count();
  return {200, std::move(out)};
}

Response Service::corpus(const std::string& id) const {
  if (!index_) return error_response(404, "no corpus configured (start the service with --corpus DIR)");
  if (id.empty()) return {200, to_json(*index_)};
  const CorpusEntry* entry = index_->find(id);
  if (!entry) return error_response(404, "no theorem '" + id + "' in the corpus");
  return {200,
          {{"id", entry->id},
           {"format", entry->format == CorpusEntry::Format::Econ ? "econ" : "smt2"},
           {"complete", entry->complete()},
           {"source", entry_source(*entry)}}};
}

void Service::record(const std::string& endpoint, const nlohmann::json& request, const Response& response) {
  std::lock_guard lock(history_mutex_);
  nlohmann::json step = {{"step", next_step_++},
                         {"endpoint", endpoint},
                         {"timestamp", utc_timestamp()},
                         {"status", response.status},
                         {"request", request},
                         {"response", response.body}};
  if (request.contains("parent")) step["parent"] = request["parent"];
  history_.push_back(std::move(step));
  while (history_.size() > options_.history_limit) history_.erase(history_.begin());
}

nlohmann::json Service::history() const {
  std::lock_guard lock(history_mutex_);
  return history_;
}

void Service::bind(httplib::Server& server) {
  auto adapt = [this](const httplib::Request& req, httplib::Response& res) {
    const Response r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(R"(/api/.*)", adapt);
  server.Post(R"(/api/.*)", adapt);
  server.Delete(R"(/api/.*)", adapt);
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

void serve(const ServiceOptions& options, const std::string& host, int port) {
  Service service(options);
  httplib::Server server;
  service.bind(server);
  if (!server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace econqe
