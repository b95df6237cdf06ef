#include "econqe/condition.hpp"

#include <algorithm>

namespace econqe {

SideCondition derive_side_condition(const TheoremProblem& problem, const std::vector<VarId>& free,
                                    const ClassifierOptions& options, const std::optional<Formula>& reference) {
  SideCondition out;
  out.vars = problem.vars;
  out.free = free;
  std::sort(out.free.begin(), out.free.end());
  out.free.erase(std::unique(out.free.begin(), out.free.end()), out.free.end());
  for (VarId v : out.free) {
    if (v >= problem.vars.size()) throw Error("free variable id " + std::to_string(v) + " is not declared");
  }
  std::vector<VarId> bound;
  for (VarId v = 0; v < problem.vars.size(); ++v) {
    if (!std::binary_search(out.free.begin(), out.free.end(), v)) bound.push_back(v);
  }
  const Formula failing = Formula::conj({problem.assumptions, Formula::negation(problem.hypothesis)});
  const Formula psi = qe_free(ExistsFormula{problem.vars, bound, failing}, options.engine);
  out.condition = simplify(to_nnf(Formula::negation(psi)));

  std::vector<VarId> all(problem.vars.size());
  for (VarId v = 0; v < all.size(); ++v) all[v] = v;
  out.sufficiency = run_query(ExistsFormula{problem.vars, all, Formula::conj({failing, out.condition})}, options);
  out.equivalence_checked = out.sufficiency.verdict.status == Status::Unsat;
  if (reference) {
    const Formula q = Formula::conj({problem.assumptions, *reference, Formula::negation(out.condition)});
    out.reference = run_query(ExistsFormula{problem.vars, all, q}, options);
    out.equivalence_checked = out.equivalence_checked && out.reference->verdict.status == Status::Unsat;
  }
  return out;
}

nlohmann::json to_json(const SideCondition& condition) {
  auto check = [&](const QueryRecord& r) {
    nlohmann::json j = to_json(r.verdict, condition.vars);
    j["engine"] = r.engine;
    j["millis"] = r.duration.count();
    return j;
  };
  nlohmann::json free = nlohmann::json::array();
  for (VarId v : condition.free) free.push_back(condition.vars.name(v));
  nlohmann::json checks = {{"sufficiency", check(condition.sufficiency)}};
  if (condition.reference) checks["reference"] = check(*condition.reference);
  return {{"free", std::move(free)},
          {"formula_dsl", to_text(condition.condition, condition.vars)},
          {"equivalence_checked", condition.equivalence_checked},
          {"checks", std::move(checks)}};
}

}  // namespace econqe
