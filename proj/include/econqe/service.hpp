#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "econqe/classifier.hpp"
#include "econqe/corpus.hpp"

namespace httplib {
class Server;
}

namespace econqe {

struct ServiceOptions {
  ClassifierOptions classifier;
  /// Served by /api/corpus; indexed once at start-up.
  std::optional<std::filesystem::path> corpus_root;
  /// Oldest history steps are dropped beyond this many.
  std::size_t history_limit = 1000;
};

/// JSON API behind `serve`:
///   POST /api/classify   problem JSON or {dsl}          -> classification
///   POST /api/qe         {dsl|problem, free[], reference?} -> side condition
///   POST /api/decide     {smt2} or {vars[], formula}    -> verdict
///   GET  /api/corpus, GET /api/corpus/{id}
///   GET  /api/history, DELETE /api/history
/// Request bodies may carry "parent" (a history step id) for what-if branches.
class Service {
 public:
  explicit Service(ServiceOptions options);

  struct Response {
    int status = 200;
    nlohmann::json body;
  };

  /// Routes one request; the HTTP layer is a thin adapter over this.
  Response handle(const std::string& method, const std::string& path, const std::string& body);

  /// Registers every route on `server`.
  void bind(httplib::Server& server);

  nlohmann::json history() const;

 private:
  Response classify(const nlohmann::json& request);
  Response qe(const nlohmann::json& request);
  Response decide(const nlohmann::json& request);
  Response corpus(const std::string& id) const;
  void record(const std::string& endpoint, const nlohmann::json& request, const Response& response);

  ServiceOptions options_;
  std::optional<CorpusIndex> index_;
  mutable std::mutex history_mutex_;
  nlohmann::json history_ = nlohmann::json::array();
  std::size_t next_step_ = 1;
};

/// Blocks serving on host:port until the process is stopped.
/// Throws econqe::Error when the port cannot be bound.
void serve(const ServiceOptions& options, const std::string& host, int port);

}  // namespace econqe
