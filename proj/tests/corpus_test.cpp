#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "econqe/corpus.hpp"
#include "econqe/error.hpp"
#include "econqe/smt2.hpp"
#include "support.hpp"

namespace econqe {
namespace {

namespace fs = std::filesystem;

class CorpusDir : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("econqe-corpus-" + std::to_string(::getpid()) + "-" +
                                         ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  void write(const fs::path& rel, const std::string& text) {
    fs::create_directories((root_ / rel).parent_path());
    std::ofstream(root_ / rel) << text;
  }

  /// The three queries of a shipped model as SMT-LIB files named by `name(role)`.
  void write_trio(const std::string& model, const std::function<std::string(const std::string&)>& name) {
    const auto trio = build_query_trio(fixtures::load_model(model));
    write(name("assumptions"), emit_smt2(trio.assumptions));
    write(name("example"), emit_smt2(trio.example));
    write(name("counterexample"), emit_smt2(trio.counterexample));
  }

  fs::path root_;
};

TEST_F(CorpusDir, GroupsScriptsByDigitsAndRoleWords) {
  write_trio("marshall.econ", [](const std::string& r) { return "econ/0001-marshall-" + r + ".smt2"; });
  write_trio("krugman_0013.econ", [](const std::string& r) { return "econ/krugman_0013_" + r + ".smt2"; });
  const auto index = index_corpus(root_);
  EXPECT_EQ(index.smt2_files, 6u);
  ASSERT_EQ(index.entries.size(), 2u);
  EXPECT_EQ(index.entries[0].id, "0001");
  EXPECT_EQ(index.entries[1].id, "0013");
  EXPECT_TRUE(index.entries[0].complete());
  EXPECT_EQ(index.entries[1].counterexample->filename(), "krugman_0013_counterexample.smt2");
  EXPECT_TRUE(index.warnings.empty());
  EXPECT_FALSE(index.layout.empty());
}

TEST_F(CorpusDir, TrioSharesOneVariableTable) {
  write_trio("marshall.econ", [](const std::string& r) { return "0001/" + r + ".smt2"; });
  const auto index = index_corpus(root_);
  ASSERT_EQ(index.entries.size(), 1u);
  EXPECT_EQ(index.entries[0].id, "0001");
  const auto trio = load_trio(index.entries[0]);
  const auto expected = build_query_trio(fixtures::load_model("marshall.econ"));
  EXPECT_EQ(trio.counterexample.vars.names(), expected.counterexample.vars.names());
  EXPECT_TRUE(trio.counterexample.matrix == expected.counterexample.matrix);
  EXPECT_TRUE(trio.example.matrix == expected.example.matrix);
  EXPECT_EQ(trio.assumptions.vars.names(), trio.example.vars.names());
}

TEST_F(CorpusDir, UnlabelledTrioUsesContent) {
  write_trio("marshall.econ", [](const std::string& r) {
    return std::string("m-0002-") + (r == "assumptions" ? "x" : r == "example" ? "y" : "z") + ".smt2";
  });
  const auto index = index_corpus(root_);
  ASSERT_EQ(index.entries.size(), 1u);
  const auto& e = index.entries[0];
  ASSERT_TRUE(e.complete()) << (index.warnings.empty() ? "" : index.warnings[0]);
  EXPECT_EQ(e.assumptions->filename(), "m-0002-x.smt2");
  EXPECT_EQ(e.example->filename(), "m-0002-y.smt2");
  EXPECT_EQ(e.counterexample->filename(), "m-0002-z.smt2");
}

TEST_F(CorpusDir, IncompleteEntriesAreFlagged) {
  write_trio("marshall.econ", [](const std::string& r) { return "0001-" + r + ".smt2"; });
  fs::remove(root_ / "0001-counterexample.smt2");
  const auto index = index_corpus(root_);
  ASSERT_EQ(index.entries.size(), 1u);
  EXPECT_FALSE(index.entries[0].complete());
  ASSERT_FALSE(index.warnings.empty());
  EXPECT_NE(index.warnings[0].find("incomplete"), std::string::npos);
  EXPECT_THROW(load_trio(index.entries[0]), Error);
  EXPECT_FALSE(to_json(index)["entries"][0]["complete"].get<bool>());
}

TEST_F(CorpusDir, EmptyAndMissingDirectories) {
  auto index = index_corpus(root_);
  EXPECT_TRUE(index.entries.empty());
  EXPECT_FALSE(index.warnings.empty());
  index = index_corpus(root_ / "absent");
  EXPECT_TRUE(index.entries.empty());
  EXPECT_FALSE(index.warnings.empty());
}

TEST_F(CorpusDir, EconModelsAndSources) {
  write("marshall.econ", fixtures::read_model("marshall.econ"));
  const auto index = index_corpus(root_);
  ASSERT_EQ(index.entries.size(), 1u);
  const auto& e = index.entries[0];
  EXPECT_EQ(e.id, "marshall");
  EXPECT_EQ(e.format, CorpusEntry::Format::Econ);
  EXPECT_EQ(entry_source(e), fixtures::read_model("marshall.econ"));
  EXPECT_EQ(load_trio(e).counterexample.matrix, build_query_trio(fixtures::load_model("marshall.econ")).counterexample.matrix);
  ASSERT_NE(index.find("marshall"), nullptr);
  EXPECT_EQ(index.find("nope"), nullptr);
}

TEST_F(CorpusDir, DigestTracksContent) {
  write("a/0001-assumptions.smt2", "(declare-fun x () Real)(assert (> x 0))");
  const auto first = index_corpus(root_).digest;
  EXPECT_EQ(index_corpus(root_).digest, first);
  write("a/0001-assumptions.smt2", "(declare-fun x () Real)(assert (> x 1))");
  EXPECT_NE(index_corpus(root_).digest, first);
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(CorpusDir, FetchFromDirectoryAndArchives) {
  const fs::path src = root_ / "src";
  fs::create_directories(src / "set");
  const auto trio = build_query_trio(fixtures::load_model("marshall.econ"));
  std::ofstream(src / "set" / "0001-assumptions.smt2") << emit_smt2(trio.assumptions);
  std::ofstream(src / "set" / "0001-example.smt2") << emit_smt2(trio.example);
  std::ofstream(src / "set" / "0001-counterexample.smt2") << emit_smt2(trio.counterexample);

  auto index = fetch_corpus(src.string(), root_ / "copy");
  ASSERT_EQ(index.entries.size(), 1u);
  EXPECT_TRUE(index.entries[0].complete());
  // Three files instead of the published 135.
  ASSERT_FALSE(index.warnings.empty());
  EXPECT_NE(index.warnings.back().find("135"), std::string::npos);

  const fs::path tarball = root_ / "set.tar.gz";
  ASSERT_EQ(std::system(("tar -czf '" + tarball.string() + "' -C '" + src.string() + "' set").c_str()), 0);
  index = fetch_corpus(tarball.string(), root_ / "from-tar");
  ASSERT_EQ(index.entries.size(), 1u);
  EXPECT_TRUE(index.entries[0].complete());

  const fs::path zip = root_ / "set.zip";
  ASSERT_EQ(std::system(("cd '" + src.string() + "' && python3 -m zipfile -c '" + zip.string() + "' set").c_str()), 0);
  index = fetch_corpus(zip.string(), root_ / "from-zip");
  ASSERT_EQ(index.entries.size(), 1u);
  EXPECT_EQ(index.digest, fetch_corpus(tarball.string(), root_ / "again").digest);

  EXPECT_THROW(fetch_corpus((root_ / "missing.bin").string(), root_ / "x"), Error);
}

}  // namespace
}  // namespace econqe
