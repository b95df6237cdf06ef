#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "econqe/service.hpp"
#include "support.hpp"

namespace econqe {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

ServiceOptions builtin_service() {
  ServiceOptions o;
  o.classifier.mode = EngineMode::Builtin;
  o.classifier.engine.deadline = std::chrono::milliseconds(5000);
  return o;
}

json dsl_request(const std::string& name) { return {{"dsl", fixtures::read_model(name)}}; }

TEST(ServiceRoutes, ClassifyMarshall) {
  Service service(builtin_service());
  const auto r = service.handle("POST", "/api/classify", dsl_request("marshall.econ").dump());
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["label"], "True");
  EXPECT_EQ(r.body["queries"]["counterexample"]["status"], "unsat");
}

TEST(ServiceRoutes, EditedSignIsMixedWithBothPoints) {
  Service service(builtin_service());
  std::string dsl = fixtures::read_model("marshall.econ");
  dsl.replace(dsl.find("v2 > 0"), 6, "v2 < 0");
  const auto r = service.handle("POST", "/api/classify", json{{"dsl", dsl}}.dump());
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["label"], "Mixed");
  EXPECT_TRUE(r.body["queries"]["example"].contains("witness"));
  EXPECT_TRUE(r.body["queries"]["counterexample"].contains("witness"));
  // Independent check of the reported counterexample point.
  const auto& w = r.body["queries"]["counterexample"]["witness"];
  const Rational v1 = parse_rational(w["v1"]), v2 = parse_rational(w["v2"]), v3 = parse_rational(w["v3"]),
                 v4 = parse_rational(w["v4"]);
  EXPECT_TRUE(v1 < 0 && v2 < 0 && v3 * v2 - 1 == v4 && v4 == v3 * v1);
  EXPECT_FALSE(v3 > 0 && v4 < 0);
}

TEST(ServiceRoutes, ParseErrorsCarryPositions) {
  Service service(builtin_service());
  const auto r = service.handle("POST", "/api/classify", json{{"dsl", "vars v1\nassume v1 <"}}.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["line"], 2);
  EXPECT_EQ(r.body["column"], 12);
  EXPECT_EQ(service.handle("POST", "/api/classify", "{not json").status, 400);
  EXPECT_EQ(service.handle("POST", "/api/classify", "[1]").status, 400);
}

TEST(ServiceRoutes, QeOnKrugman) {
  Service service(builtin_service());
  json request = dsl_request("krugman_0013.econ");
  request["free"] = {"Dw", "Sw"};
  request["reference"] = "Sw >= -Dw and -Dw > 0";
  const auto r = service.handle("POST", "/api/qe", request.dump());
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_TRUE(r.body["equivalence_checked"].get<bool>());
  EXPECT_FALSE(r.body["formula_dsl"].get<std::string>().empty());

  request["free"] = {"nope"};
  EXPECT_EQ(service.handle("POST", "/api/qe", request.dump()).status, 422);
  request.erase("free");
  EXPECT_EQ(service.handle("POST", "/api/qe", request.dump()).status, 422);
}

TEST(ServiceRoutes, QeDegreeErrorIsVerbatim) {
  Service service(builtin_service());
  const auto r = service.handle(
      "POST", "/api/qe", json{{"dsl", "vars x y\nassume y^3 = x\nhypothesis y > 0"}, {"free", {"x"}}}.dump());
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body["reason"], "vs-degree-exceeded");
}

TEST(ServiceRoutes, Decide) {
  Service service(builtin_service());
  auto r = service.handle("POST", "/api/decide", json{{"vars", {"x"}}, {"formula", "x*x < 0"}}.dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["status"], "unsat");
  r = service.handle("POST", "/api/decide",
                     json{{"smt2", "(declare-fun x () Real)(assert (= (* 2 x) 1))(check-sat)"}}.dump());
  EXPECT_EQ(r.body["status"], "sat");
  EXPECT_EQ(r.body["witness"]["x"], "1/2");
  EXPECT_EQ(r.body["engine"], "builtin");
}

TEST(ServiceRoutes, HistoryTrailAndClear) {
  Service service(builtin_service());
  service.handle("POST", "/api/classify", dsl_request("marshall.econ").dump());
  json child = dsl_request("marshall.econ");
  child["parent"] = 1;
  service.handle("POST", "/api/classify", child.dump());
  auto h = service.handle("GET", "/api/history", "").body;
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0]["step"], 1);
  EXPECT_EQ(h[1]["parent"], 1);
  EXPECT_EQ(h[1]["response"]["label"], "True");
  EXPECT_EQ(service.handle("DELETE", "/api/history", "").body["cleared"], 2);
  EXPECT_TRUE(service.history().empty());
}

TEST(ServiceRoutes, UnknownRoutesAndMethods) {
  Service service(builtin_service());
  EXPECT_EQ(service.handle("GET", "/api/nothing", "").status, 404);
  EXPECT_EQ(service.handle("GET", "/api/classify", "").status, 405);
  EXPECT_EQ(service.handle("GET", "/api/corpus", "").status, 404);
}

TEST(ServiceRoutes, Corpus) {
  const fs::path dir = fs::temp_directory_path() / ("econqe-service-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "marshall.econ") << fixtures::read_model("marshall.econ");
  auto options = builtin_service();
  options.corpus_root = dir;
  Service service(options);
  auto r = service.handle("GET", "/api/corpus", "");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["theorems"], 1);
  r = service.handle("GET", "/api/corpus/marshall", "");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["source"], fixtures::read_model("marshall.econ"));
  EXPECT_EQ(service.handle("GET", "/api/corpus/0099", "").status, 404);
  fs::remove_all(dir);
}

TEST(ServiceHttp, ConcurrentClientsOverLoopback) {
  Service service(builtin_service());
  httplib::Server server;
  service.bind(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  std::vector<std::thread> clients;
  std::atomic<int> ok{0};
  for (int i = 0; i < 4; ++i) {
    clients.emplace_back([&] {
      httplib::Client client("127.0.0.1", port);
      auto res = client.Post("/api/classify", dsl_request("marshall.econ").dump(), "application/json");
      if (res && res->status == 200 && json::parse(res->body)["label"] == "True") ++ok;
    });
  }
  for (auto& c : clients) c.join();
  EXPECT_EQ(ok.load(), 4);

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/history");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body).size(), 4u);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  res = client.Delete("/api/history");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);

  server.stop();
  loop.join();
}

}  // namespace
}  // namespace econqe
