#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "econqe/batch.hpp"
#include "econqe/smt2.hpp"
#include "support.hpp"

namespace econqe {
namespace {

namespace fs = std::filesystem;
using std::chrono::milliseconds;

ClassifierOptions quick_builtin() {
  ClassifierOptions o;
  o.mode = EngineMode::Builtin;
  o.engine.deadline = milliseconds(1500);
  return o;
}

class BatchDir : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("econqe-batch-" + std::to_string(::getpid()) + "-" +
                                         ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  fs::path root_;
};

TEST_F(BatchDir, SingleMarshallModel) {
  std::ofstream(root_ / "marshall.econ") << fixtures::read_model("marshall.econ");
  const auto m = batch_classify(index_corpus(root_), quick_builtin());
  ASSERT_EQ(m.rows.size(), 1u);
  ASSERT_TRUE(m.rows[0].result);
  EXPECT_EQ(m.rows[0].result->outcome.kind, Outcome::Kind::TheoremTrue);
  EXPECT_EQ(m.outcome_counts().at("TheoremTrue"), 1u);
  EXPECT_EQ(m.counterexample_count(Status::Unsat), 1u);
  const auto j = to_json(m);
  EXPECT_EQ(j["summary"]["problems"], 1);
  EXPECT_EQ(j["tool_versions"]["econqe"], kVersion);
}

TEST_F(BatchDir, ShippedModelsAsSmtTrios) {
  const std::pair<const char*, const char*> models[] = {
      {"marshall.econ", "0001"}, {"krugman_0013.econ", "0013"}, {"hicks_0078.econ", "0078"}};
  for (const auto& [model, id] : models) {
    const auto trio = build_query_trio(fixtures::load_model(model));
    std::ofstream(root_ / (std::string(id) + "-assumptions.smt2")) << emit_smt2(trio.assumptions);
    std::ofstream(root_ / (std::string(id) + "-example.smt2")) << emit_smt2(trio.example);
    std::ofstream(root_ / (std::string(id) + "-counterexample.smt2")) << emit_smt2(trio.counterexample);
  }
  const auto m = batch_classify(index_corpus(root_), quick_builtin());
  ASSERT_EQ(m.rows.size(), 3u);
  EXPECT_EQ(m.rows[0].id, "0001");
  EXPECT_EQ(m.rows[0].result->outcome.kind, Outcome::Kind::TheoremTrue);
  EXPECT_EQ(m.rows[1].result->outcome.kind, Outcome::Kind::Mixed);
  EXPECT_EQ(m.rows[2].result->outcome.kind, Outcome::Kind::TheoremTrue);
}

TEST_F(BatchDir, WorkerCountDoesNotChangeTheManifest) {
  for (const char* model : {"marshall.econ", "krugman_0013.econ", "hicks_0078.econ"}) {
    std::ofstream(root_ / model) << fixtures::read_model(model);
  }
  std::ofstream(root_ / "toy.econ") << "vars x y\nassume y = x*x\nhypothesis y > x\n";
  const auto index = index_corpus(root_);
  const auto one = to_json(batch_classify(index, quick_builtin(), 1));
  const auto four = to_json(batch_classify(index, quick_builtin(), 4));
  EXPECT_EQ(without_timings(one), without_timings(four));
  EXPECT_EQ(one["rows"].size(), 4u);
  EXPECT_FALSE(without_timings(one)["rows"][0]["queries"]["assumptions"].contains("millis"));
}

TEST_F(BatchDir, FailuresBecomeErrorRows) {
  std::ofstream(root_ / "broken.econ") << "vars x\nassume x <\n";
  std::ofstream(root_ / "marshall.econ") << fixtures::read_model("marshall.econ");
  const auto m = batch_classify(index_corpus(root_), quick_builtin(), 2);
  ASSERT_EQ(m.rows.size(), 2u);
  EXPECT_EQ(m.rows[0].id, "broken");
  EXPECT_FALSE(m.rows[0].result);
  EXPECT_FALSE(m.rows[0].error.empty());
  EXPECT_EQ(m.error_count(), 1u);
  EXPECT_EQ(m.outcome_counts().at("Unknown"), 1u);
  EXPECT_EQ(to_json(m)["rows"][0]["outcome"], "Unknown");
}

TEST_F(BatchDir, EmptyCorpus) {
  const auto m = batch_classify(index_corpus(root_), quick_builtin(), 3);
  EXPECT_TRUE(m.rows.empty());
  EXPECT_EQ(to_json(m)["summary"]["problems"], 0);
}

}  // namespace
}  // namespace econqe
