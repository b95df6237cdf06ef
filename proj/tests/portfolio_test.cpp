#include <gtest/gtest.h>

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "econqe/encoders.hpp"
#include "econqe/error.hpp"
#include "econqe/portfolio.hpp"
#include "support.hpp"

namespace econqe {
namespace {

namespace fs = std::filesystem;
using std::chrono::milliseconds;

const char* const kMarshallModel = R"(sat
(
  (define-fun v1 () Real (- 1))
  (define-fun v2 () Real 1)
  (define-fun v3 () Real (/ 1 2))
  (define-fun v4 () Real (- (/ 1 2)))
))";

/// Scratch directory with fake solver scripts; removed at the end of the test.
class FakeSolvers : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("econqe-portfolio-" + std::to_string(::getpid()) + "-" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Writes an executable script that ignores its argument and prints `output`.
  std::string script(const std::string& name, const std::string& body) {
    const fs::path path = dir_ / name;
    std::ofstream(path) << "#!/bin/sh\n" << body << "\n";
    fs::permissions(path, fs::perms::owner_all);
    return path.string();
  }

  SolverSpec printing(const std::string& name, const std::string& output, milliseconds timeout = milliseconds(5000)) {
    const fs::path data = dir_ / (name + ".txt");
    std::ofstream(data) << output;
    return {name, script(name, "cat '" + data.string() + "'") + " {file}", timeout, true};
  }

  SolverSpec sleeping(const std::string& name, milliseconds timeout) {
    return {name, script(name, "sleep 30; echo unsat") + " {file}", timeout, true};
  }

  ExistsFormula marshall(bool counterexample) {
    const auto trio = build_query_trio(fixtures::load_model("marshall.econ"));
    return counterexample ? trio.counterexample : trio.example;
  }

  fs::path dir_;
};

TEST_F(FakeSolvers, UnsatAnswer) {
  const auto r = run_portfolio(marshall(true), {printing("fake", "unsat\n")});
  EXPECT_EQ(r.verdict.status, Status::Unsat);
  EXPECT_EQ(r.solver, "fake");
  ASSERT_EQ(r.lanes.size(), 1u);
}

TEST_F(FakeSolvers, ValidModelBecomesWitness) {
  const auto r = run_portfolio(marshall(false), {printing("fake", kMarshallModel)});
  ASSERT_EQ(r.verdict.status, Status::Sat);
  ASSERT_TRUE(r.verdict.witness);
  EXPECT_EQ(r.verdict.witness->at(2), fixtures::ratio(1, 2));
  EXPECT_TRUE(evaluate_at(marshall(false).matrix, *r.verdict.witness));
}

TEST_F(FakeSolvers, WrongModelIsDemoted) {
  std::string corrupted = kMarshallModel;
  corrupted.replace(corrupted.find("(/ 1 2))\n"), 8, "(- 2))\n");
  const auto r = run_portfolio(marshall(false), {printing("liar", corrupted)});
  EXPECT_EQ(r.verdict.status, Status::Unknown);
  EXPECT_EQ(r.lanes.at(0).reason, "model-validation-failed");
  EXPECT_EQ(r.verdict.reason, "liar: model-validation-failed");
}

TEST_F(FakeSolvers, UnparseableAndMissingModels) {
  auto r = run_portfolio(marshall(false), {printing("garbled", "sat\n((define-fun v1 () Real")});
  EXPECT_EQ(r.verdict.status, Status::Unknown);
  EXPECT_EQ(r.lanes.at(0).reason, "model-parse-failed");
  r = run_portfolio(marshall(false), {printing("silent", "sat\n")});
  EXPECT_EQ(r.lanes.at(0).reason, "model-missing");
  SolverSpec no_models = printing("plain", "sat\n");
  no_models.parses_model = false;
  r = run_portfolio(marshall(false), {no_models});
  EXPECT_EQ(r.verdict.status, Status::Sat);
  EXPECT_EQ(r.verdict.reason, "unvalidated-model");
  EXPECT_FALSE(r.verdict.witness);
}

TEST_F(FakeSolvers, AlgebraicModelIsSatWithoutWitness) {
  const auto r = run_portfolio(
      marshall(false),
      {printing("alg", "sat\n((define-fun v1 () Real (root-obj (+ (^ x 2) (- 2)) 1)) (define-fun v2 () Real 1))")});
  EXPECT_EQ(r.verdict.status, Status::Sat);
  EXPECT_EQ(r.verdict.reason, "unvalidated-model");
  EXPECT_FALSE(r.verdict.witness);
}

TEST_F(FakeSolvers, TimeoutKillsTheSolver) {
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_portfolio(marshall(true), {sleeping("slow", milliseconds(150))});
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
  EXPECT_EQ(r.verdict.status, Status::Unknown);
  EXPECT_EQ(r.verdict.reason, "timeout");
}

TEST_F(FakeSolvers, DeadlineCapsLaneTimeout) {
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_portfolio(marshall(true), {sleeping("slow", milliseconds(60000))}, PortfolioMode::Race,
                               milliseconds(100));
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
  EXPECT_EQ(r.verdict.reason, "timeout");
}

TEST_F(FakeSolvers, RaceTakesFirstDefinitiveAnswer) {
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_portfolio(marshall(true), {sleeping("slow", milliseconds(60000)), printing("quick", "unsat")});
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
  EXPECT_EQ(r.verdict.status, Status::Unsat);
  EXPECT_EQ(r.solver, "quick");
  EXPECT_EQ(r.lanes.at(0).reason, "cancelled");
}

TEST_F(FakeSolvers, SequentialSkipsUnknownLanes) {
  const auto r = run_portfolio(marshall(true), {printing("shrug", "unknown"), printing("sure", "unsat"),
                                                printing("never", "sat")},
                               PortfolioMode::Sequential);
  EXPECT_EQ(r.verdict.status, Status::Unsat);
  EXPECT_EQ(r.solver, "sure");
  ASSERT_EQ(r.lanes.size(), 3u);
  EXPECT_EQ(r.lanes[0].reason, "unknown");
  EXPECT_EQ(r.lanes[2].reason, "not-run");
}

TEST_F(FakeSolvers, SpawnFailureIsNotFatal) {
  const SolverSpec missing{"ghost", "/nonexistent/solver-binary {file}", milliseconds(5000), true};
  auto r = run_portfolio(marshall(true), {missing});
  EXPECT_EQ(r.verdict.status, Status::Unknown);
  EXPECT_EQ(r.lanes.at(0).reason.rfind("spawn-failed", 0), 0u);
  EXPECT_FALSE(r.lanes.at(0).stderr_excerpt.empty());
  r = run_portfolio(marshall(true), {missing, printing("backup", "unsat")});
  EXPECT_EQ(r.verdict.status, Status::Unsat);
}

TEST_F(FakeSolvers, SolverErrorOutput) {
  const auto r = run_portfolio(marshall(true), {printing("err", "(error \"line 3: unsupported\")\n")});
  EXPECT_EQ(r.lanes.at(0).reason, "solver-error");
}

TEST_F(FakeSolvers, ScriptPathIsPassedQuoted) {
  const SolverSpec echo{"echo", script("echo", "head -c 25 \"$1\"; echo; echo unsat >&2") + " {file}",
                        milliseconds(5000), false};
  const auto r = run_portfolio(marshall(true), {echo});
  EXPECT_EQ(r.lanes.at(0).reason, "unrecognized-output");
  EXPECT_EQ(r.lanes.at(0).stderr_excerpt, "unsat\n");
}

TEST_F(FakeSolvers, ConfigFile) {
  const fs::path ini = dir_ / "solvers.ini";
  std::ofstream(ini) << "[z3]\ncmd = z3 -smt2 {file}\ntimeout_ms = 1500\n\n[cvc5]\ncmd = cvc5 --produce-models {file}\n"
                        "parses_model = false\n";
  const auto specs = load_solver_config(ini.string());
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[0].name, "z3");
  EXPECT_EQ(specs[0].command, "z3 -smt2 {file}");
  EXPECT_EQ(specs[0].timeout, milliseconds(1500));
  EXPECT_TRUE(specs[0].parses_model);
  EXPECT_EQ(specs[1].timeout, milliseconds(60000));
  EXPECT_FALSE(specs[1].parses_model);

  std::ofstream(ini) << "[bad]\ncmd = z3 -smt2\n";
  EXPECT_THROW(load_solver_config(ini.string()), Error);
  std::ofstream(ini) << "[bad]\ncmd = z3 {file} {file}\n";
  EXPECT_THROW(load_solver_config(ini.string()), Error);
  std::ofstream(ini) << "[bad]\ntimeout_ms = 3\n";
  EXPECT_THROW(load_solver_config(ini.string()), Error);
  std::ofstream(ini) << "[bad]\ncmd = z3 {file}\ntimeout_ms = soon\n";
  EXPECT_THROW(load_solver_config(ini.string()), Error);
  EXPECT_THROW(load_solver_config((dir_ / "absent.ini").string()), Error);
}

TEST(SolverConfigPath, ExplicitBeatsEnvironment) {
  ::setenv("ECONQE_SOLVERS", "/etc/from-env.ini", 1);
  EXPECT_EQ(solver_config_path(std::string("/x.ini")), std::optional<std::string>("/x.ini"));
  EXPECT_EQ(solver_config_path(), std::optional<std::string>("/etc/from-env.ini"));
  ::unsetenv("ECONQE_SOLVERS");
  EXPECT_FALSE(solver_config_path());
}

bool have_z3() { return std::system("command -v z3 >/dev/null 2>&1") == 0; }

TEST(RealZ3, DecidesMarshall) {
  if (!have_z3()) GTEST_SKIP() << "z3 not on PATH";
  const SolverSpec z3{"z3", "z3 -smt2 {file}", milliseconds(30000), true};
  const auto trio = build_query_trio(fixtures::load_model("marshall.econ"));
  auto r = run_portfolio(trio.counterexample, {z3});
  EXPECT_EQ(r.verdict.status, Status::Unsat);
  r = run_portfolio(trio.example, {z3});
  ASSERT_EQ(r.verdict.status, Status::Sat);
  if (r.verdict.witness) EXPECT_TRUE(evaluate_at(trio.example.matrix, *r.verdict.witness));
}

}  // namespace
}  // namespace econqe
