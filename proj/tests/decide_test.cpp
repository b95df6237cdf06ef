#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "econqe/decision.hpp"
#include "econqe/encoders.hpp"
#include "econqe/error.hpp"
#include "econqe/problem.hpp"
#include "support.hpp"

using namespace econqe;

namespace {

ExistsFormula exists_all(const std::vector<std::string>& names, const std::string& text) {
  VariableTable vars(names);
  Formula f = parse_formula(text, vars);
  std::vector<VarId> bound(vars.size());
  for (VarId v = 0; v < bound.size(); ++v) bound[v] = v;
  return ExistsFormula{vars, bound, f};
}

ExistsFormula exists_all(const Formula& f, unsigned vars) {
  std::vector<std::string> names;
  for (unsigned i = 0; i < vars; ++i) names.push_back("x" + std::to_string(i));
  std::vector<VarId> bound(vars);
  for (VarId v = 0; v < vars; ++v) bound[v] = v;
  return ExistsFormula{VariableTable(names), bound, f};
}

void expect_valid(const Verdict& v, const ExistsFormula& q) {
  if (v.status == Status::Sat && v.witness) {
    EXPECT_TRUE(evaluate_at(q.matrix, *v.witness));
  }
  if (v.status != Status::Sat) {
    EXPECT_FALSE(v.witness.has_value());
  }
}

}  // namespace

TEST(WitnessSearch, MarshallExample) {
  const auto trio = build_query_trio(fixtures::load_model("marshall.econ"));
  const auto v = witness_search(trio.example, EngineConfig{});
  ASSERT_EQ(v.status, Status::Sat);
  ASSERT_TRUE(v.witness);
  EXPECT_TRUE(evaluate_at(trio.example.matrix, *v.witness));
  const Point known{{0, -1}, {1, 1}, {2, Rational(1, 2)}, {3, Rational(-1, 2)}};
  EXPECT_TRUE(evaluate_at(trio.example.matrix, known));
}

TEST(WitnessSearch, NeverClaimsUnsat) {
  const auto q = exists_all({"x"}, "x^2 < 0");
  const auto v = witness_search(q, EngineConfig{});
  EXPECT_EQ(v.status, Status::Unknown);
  EXPECT_EQ(v.reason, "no-witness-found");
}

TEST(WitnessSearch, SolvesLinearEqualities) {
  const auto q = exists_all({"x", "y"}, "x + y = 1 and x > 0");
  EngineConfig cfg;
  cfg.sample_count = 1;
  const auto v = witness_search(q, cfg);
  ASSERT_EQ(v.status, Status::Sat);
  EXPECT_EQ(v.witness->at(0) + v.witness->at(1), Rational(1));
}

TEST(WitnessSearch, HonoursBoundsOfDefinedVariables) {
  const auto trio = build_query_trio(fixtures::load_model("marshall.econ"));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    EngineConfig cfg;
    cfg.seed = seed;
    EXPECT_EQ(witness_search(trio.assumptions, cfg).status, Status::Sat) << seed;
  }
}

TEST(Decide, MarshallCounterexampleIsUnsat) {
  const auto trio = build_query_trio(fixtures::load_model("marshall.econ"));
  const auto v = decide_existential(trio.counterexample, EngineConfig{});
  EXPECT_EQ(v.status, Status::Unsat);
}

TEST(Decide, ContradictionAndDegreeLimit) {
  EXPECT_EQ(decide_existential(exists_all({"v"}, "v > 0 and v < 0"), EngineConfig{}).status, Status::Unsat);
  EXPECT_EQ(decide_existential(exists_all({"x"}, "x^2 < 0"), EngineConfig{}).status, Status::Unsat);
  const auto quintic = decide_existential(exists_all({"x"}, "x^5 - x - 1 = 0"), EngineConfig{});
  EXPECT_EQ(quintic.status, Status::Unknown);
  EXPECT_EQ(quintic.reason, "vs-degree-exceeded");
}

TEST(Decide, IrrationalWitnessIsSatWithoutPoint) {
  const auto v = decide_existential(exists_all({"x"}, "x^2 = 2"), EngineConfig{});
  EXPECT_EQ(v.status, Status::Sat);
  EXPECT_FALSE(v.witness.has_value());
}

TEST(Decide, ZeroDeadlineTimesOut) {
  EngineConfig cfg;
  cfg.deadline = std::chrono::milliseconds(0);
  const auto v = decide_existential(exists_all({"x", "y"}, "x*y > 1 and x < 0 and y > 0"), cfg);
  EXPECT_EQ(v.status, Status::Unknown);
  EXPECT_EQ(v.reason, "timeout");
}

TEST(Decide, ClauseCapIsReported) {
  std::string text;
  std::vector<std::string> names;
  for (int i = 0; i < 8; ++i) {
    names.push_back("a" + std::to_string(i));
    names.push_back("b" + std::to_string(i));
    if (i) text += " and ";
    text += "(a" + std::to_string(i) + "^2 < -1 or b" + std::to_string(i) + "^2 < -1)";
  }
  EngineConfig cfg;
  cfg.clause_cap = 100;
  const auto v = decide_existential(exists_all(names, text), cfg);
  EXPECT_EQ(v.status, Status::Unknown);
  EXPECT_EQ(v.reason, "clause-cap");
}

TEST(Decide, SatWitnessesAlwaysValidate) {
  std::mt19937_64 rng(77);
  EngineConfig cfg;
  cfg.sample_count = 4;
  cfg.deadline = std::chrono::milliseconds(2000);
  std::size_t sat = 0, unsat = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto q = exists_all(fixtures::random_formula(rng, 3, 2, 2), 3);
    const auto v = decide_existential(q, cfg);
    expect_valid(v, q);
    sat += v.status == Status::Sat;
    unsat += v.status == Status::Unsat;
  }
  EXPECT_GT(sat, 100U);
  EXPECT_GT(unsat, 10U);
}

TEST(Decide, UnsatAnswersHaveNoPaletteCounterexample) {
  std::mt19937_64 rng(78);
  EngineConfig cfg;
  cfg.sample_count = 2;
  for (int i = 0; i < 300; ++i) {
    const auto q = exists_all(fixtures::random_formula(rng, 2, 2, 2), 2);
    if (decide_existential(q, cfg).status != Status::Unsat) continue;
    for (int a = -8; a <= 8; ++a) {
      for (int b = -8; b <= 8; ++b) {
        ASSERT_FALSE(evaluate_at(q.matrix, {{0, fixtures::ratio(a, 2)}, {1, fixtures::ratio(b, 2)}})) << "formula " << i;
      }
    }
  }
}

TEST(Decide, DeterministicUnderFixedSeed) {
  std::mt19937_64 rng(79);
  for (int i = 0; i < 100; ++i) {
    const auto q = exists_all(fixtures::random_formula(rng, 3, 2, 2), 3);
    const auto a = decide_existential(q, EngineConfig{});
    const auto b = decide_existential(q, EngineConfig{});
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.witness, b.witness);
    EXPECT_EQ(a.reason, b.reason);
  }
}

TEST(Decide, StatusIsIndependentOfEliminationOrder) {
  std::mt19937_64 rng(80);
  std::size_t suite = 0;
  for (int i = 0; i < 400 && suite < 50; ++i) {
    const auto q = exists_all(fixtures::random_formula(rng, 3, 2, 2), 3);
    std::vector<VarId> order{0, 1, 2};
    std::vector<Status> statuses;
    do {
      EngineConfig cfg;
      cfg.sample_count = 1;
      cfg.order = order;
      statuses.push_back(decide_existential(q, cfg).status);
    } while (std::next_permutation(order.begin(), order.end()));
    if (std::count(statuses.begin(), statuses.end(), Status::Unknown) != 0) continue;
    ++suite;
    for (const auto s : statuses) EXPECT_EQ(s, statuses.front()) << "formula " << i;
  }
  EXPECT_EQ(suite, 50U);
}

TEST(Decide, DistributionAgreesWithDirectAnswer) {
  std::mt19937_64 rng(81);
  for (int i = 0; i < 200; ++i) {
    const auto q = exists_all(fixtures::random_formula(rng, 3, 2, 2), 3);
    const auto direct = decide_existential(q, EngineConfig{});
    if (direct.status == Status::Unknown) continue;
    bool any_sat = false, all_unsat = true;
    for (const auto& sub : distribute_exists_over_dnf(q)) {
      const auto v = decide_existential(sub, EngineConfig{});
      any_sat = any_sat || v.status == Status::Sat;
      all_unsat = all_unsat && v.status == Status::Unsat;
    }
    if (direct.status == Status::Sat) {
      EXPECT_FALSE(all_unsat) << i;
    } else {
      EXPECT_FALSE(any_sat) << i;
    }
  }
}

TEST(QeFree, NothingQuantifiedReturnsSimplifiedInput) {
  VariableTable vars({"y"});
  const auto f = parse_formula("y > 0 and y >= 0", vars);
  EXPECT_EQ(qe_free(ExistsFormula{vars, {}, f}, EngineConfig{}), parse_formula("y > 0", vars));
}

TEST(QeFree, SquareIsAlwaysWitnessed) {
  VariableTable vars({"x", "y"});
  EXPECT_TRUE(qe_free(ExistsFormula{vars, {0}, parse_formula("x = y^2", vars)}, EngineConfig{}).is_true());
}

TEST(QeFree, QuadraticBoundedFromBelow) {
  VariableTable vars({"x", "c"});
  const auto g = qe_free(ExistsFormula{vars, {0}, parse_formula("x^2 + c < 0", vars)}, EngineConfig{});
  for (int c = -4; c <= 4; ++c) EXPECT_EQ(evaluate_at(g, {{1, c}}), c < 0) << c;
}

TEST(QeFree, DegreeErrorNamesTheAtom) {
  VariableTable vars({"x", "y"});
  try {
    qe_free(ExistsFormula{vars, {0}, parse_formula("x^3 = y", vars)}, EngineConfig{});
    FAIL();
  } catch (const DegreeExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("x"), std::string::npos);
  }
}
