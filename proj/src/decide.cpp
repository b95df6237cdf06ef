#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "econqe/decision.hpp"
#include "econqe/error.hpp"
#include "vs_internal.hpp"

namespace econqe {

const char* to_string(Status status) {
  switch (status) {
    case Status::Sat: return "sat";
    case Status::Unsat: return "unsat";
    case Status::Unknown: return "unknown";
  }
  return "unknown";
}

std::vector<VarId> choose_elimination_order(const Formula& f, const std::vector<VarId>& quantified,
                                            const std::optional<std::vector<VarId>>& suggested) {
  if (suggested) {
    std::vector<VarId> out;
    for (VarId v : *suggested) {
      if (std::find(quantified.begin(), quantified.end(), v) != quantified.end()) out.push_back(v);
    }
    return out;
  }
  const auto atoms = atoms_of(f);
  std::vector<std::tuple<unsigned, std::size_t, VarId>> keys;
  for (VarId v : quantified) {
    unsigned degree = 0;
    std::size_t count = 0;
    for (const auto& a : atoms) {
      const unsigned d = a.lhs.degree_in(v);
      if (d == 0) continue;
      degree = std::max(degree, d);
      ++count;
    }
    keys.emplace_back(degree, count, v);
  }
  std::sort(keys.begin(), keys.end());
  std::vector<VarId> out;
  for (const auto& k : keys) out.push_back(std::get<2>(k));
  return out;
}

std::vector<ExistsFormula> distribute_exists_over_dnf(const ExistsFormula& query, std::size_t clause_cap) {
  std::vector<ExistsFormula> out;
  for (const auto& clause : to_dnf(query.matrix, clause_cap)) {
    const auto occurring = variables_of(clause);
    std::vector<VarId> bound;
    for (VarId v : query.bound) {
      if (std::binary_search(occurring.begin(), occurring.end(), v)) bound.push_back(v);
    }
    out.push_back(ExistsFormula{query.vars, std::move(bound), from_clause(clause)});
  }
  return out;
}

namespace {

struct ClauseHash {
  std::size_t operator()(const Clause& c) const noexcept {
    std::size_t h = c.size();
    for (const auto& a : c) h = h * 31 + a.lhs.hash() * 7 + static_cast<std::size_t>(a.rel);
    return h;
  }
};

using Clock = std::chrono::steady_clock;

/// Depth-first search over virtual-substitution branches of one clause.
class ClauseSearch {
 public:
  ClauseSearch(const EngineConfig& cfg, const VariableTable& vars, std::vector<VarId> bound, Clock::time_point deadline)
      : cfg_(cfg), vars_(vars), bound_(std::move(bound)), deadline_(deadline) {}

  /// SAT with an optional witness over the clause's variables, UNSAT, or UNKNOWN.
  Verdict solve(const Clause& input) {
    if (Clock::now() > deadline_) throw DeadlineExceeded();
    auto merged = merge_clause(input);
    if (!merged) return Verdict::unsat();
    const Clause& clause = *merged;
    if (clause.empty()) return Verdict::sat(Point{});
    if (refuted_.count(clause)) return Verdict::unsat();

    const auto present = variables_of(clause);
    std::vector<VarId> candidates;
    for (VarId v : present) {
      if (std::find(bound_.begin(), bound_.end(), v) != bound_.end()) candidates.push_back(v);
    }
    if (candidates.empty()) return Verdict::unknown("free-variables-present");
    const auto x = detail::pick_variable(clause, candidates, cfg_.order);
    if (!x) return Verdict::unknown("vs-degree-exceeded");

    std::string unknown_reason;
    for (auto& branch : detail::clause_branches(clause, *x, &vars_)) {
      std::vector<Clause> parts;
      try {
        parts = to_dnf(branch.formula, cfg_.clause_cap);
      } catch (const ClauseCapExceeded&) {
        unknown_reason = "clause-cap";
        continue;
      }
      for (const auto& part : parts) {
        Verdict sub = solve(part);
        if (sub.status == Status::Sat) {
          if (branch.point && sub.witness) sub.witness = extend(clause, *x, *branch.point, *sub.witness);
          if (sub.witness) {
            for (VarId v : present) sub.witness->try_emplace(v, 0);
          }
          return sub;
        }
        if (sub.status == Status::Unknown && unknown_reason.empty()) unknown_reason = sub.reason;
      }
    }
    if (!unknown_reason.empty()) return Verdict::unknown(unknown_reason);
    refuted_.insert(clause);
    return Verdict::unsat();
  }

 private:
  /// Adds a value for x to a witness of the substituted branch.
  std::optional<Point> extend(const Clause& clause, VarId x, const TestPoint& tp, Point point) const {
    for (VarId v : variables_of(clause)) {
      if (v != x) point.try_emplace(v, 0);
    }
    std::vector<Rational> candidates;
    switch (tp.kind) {
      case TestPoint::Kind::ExactRoot: {
        auto value = detail::root_value(tp.root, point);
        if (!value) return std::nullopt;
        candidates.push_back(*value);
        break;
      }
      case TestPoint::Kind::EpsilonAbove: {
        auto value = detail::root_value(tp.root, point);
        if (!value) return std::nullopt;
        Rational step = 1;
        for (int k = 0; k < 96; ++k, step /= 2) candidates.push_back(*value + step);
        break;
      }
      case TestPoint::Kind::MinusInfinity: {
        Rational magnitude = 1;
        for (int k = 0; k < 96; ++k, magnitude *= 2) candidates.push_back(-magnitude);
        break;
      }
    }
    for (const auto& c : candidates) {
      point[x] = c;
      if (evaluate_at(clause, point)) return point;
    }
    return std::nullopt;
  }

  const EngineConfig& cfg_;
  const VariableTable& vars_;
  std::vector<VarId> bound_;
  Clock::time_point deadline_;
  std::unordered_set<Clause, ClauseHash> refuted_;
};

std::vector<VarId> closure_of(const ExistsFormula& query) {
  std::set<VarId> bound(query.bound.begin(), query.bound.end());
  for (VarId v : variables_of(query.matrix)) bound.insert(v);
  return {bound.begin(), bound.end()};
}

/// True when the linear atoms of `clause` are already contradictory; this
/// spares the search from high-degree atoms that play no part in the proof.
bool linear_core_refuted(const Clause& clause, ClauseSearch& search) {
  Clause core;
  for (const auto& a : clause) {
    if (a.lhs.total_degree() == 1) core.push_back(a);
  }
  if (core.empty() || core.size() == clause.size()) return false;
  return search.solve(core).status == Status::Unsat;
}

}  // namespace

Verdict decide_existential(const ExistsFormula& query, const EngineConfig& cfg) {
  const auto deadline = Clock::now() + cfg.deadline;
  Verdict sampled = witness_search(query, cfg);
  if (sampled.status == Status::Sat) return sampled;

  std::vector<Clause> clauses;
  try {
    clauses = to_dnf(query.matrix, cfg.clause_cap);
  } catch (const ClauseCapExceeded&) {
    return Verdict::unknown("clause-cap");
  }
  const auto bound = closure_of(query);
  ClauseSearch search(cfg, query.vars, bound, deadline);
  std::string unknown_reason;
  try {
    for (const auto& clause : clauses) {
      if (linear_core_refuted(clause, search)) continue;
      Verdict v = search.solve(clause);
      if (v.status == Status::Sat) {
        if (v.witness) {
          for (VarId b : bound) v.witness->try_emplace(b, 0);
          for (VarId b : query.bound) v.witness->try_emplace(b, 0);
          if (!evaluate_at(query.matrix, *v.witness)) v.witness.reset();
        }
        return v;
      }
      if (v.status == Status::Unknown && unknown_reason.empty()) unknown_reason = v.reason;
    }
  } catch (const DeadlineExceeded&) {
    return Verdict::unknown("timeout");
  }
  if (!unknown_reason.empty()) return Verdict::unknown(unknown_reason);
  return Verdict::unsat();
}

namespace {

class Eliminator {
 public:
  Eliminator(const EngineConfig& cfg, const VariableTable& vars, std::vector<VarId> bound, Clock::time_point deadline)
      : cfg_(cfg), vars_(vars), bound_(std::move(bound)), deadline_(deadline) {}

  void run(const Clause& input, std::vector<Clause>& out) {
    if (Clock::now() > deadline_) throw DeadlineExceeded();
    auto merged = merge_clause(input);
    if (!merged) return;
    const Clause& clause = *merged;
    std::vector<VarId> candidates;
    for (VarId v : variables_of(clause)) {
      if (std::binary_search(bound_.begin(), bound_.end(), v)) candidates.push_back(v);
    }
    if (candidates.empty()) {
      if (seen_.insert(clause).second) {
        out.push_back(clause);
        if (out.size() > cfg_.clause_cap) throw ClauseCapExceeded("qe result exceeds the clause cap");
      }
      return;
    }
    const auto x = detail::pick_variable(clause, candidates, cfg_.order);
    if (!x) {
      for (VarId v : candidates) {
        for (const auto& a : clause) {
          if (a.lhs.degree_in(v) > EngineConfig::kMaxVsDegree) {
            throw DegreeExceeded("vs-degree-exceeded: " + vars_.name(v) + " has degree " +
                                 std::to_string(a.lhs.degree_in(v)) + " in " + to_text(a, vars_));
          }
        }
      }
      throw DegreeExceeded("vs-degree-exceeded");
    }
    for (auto& branch : detail::clause_branches(clause, *x, &vars_)) {
      for (const auto& part : to_dnf(branch.formula, cfg_.clause_cap)) run(part, out);
    }
  }

 private:
  const EngineConfig& cfg_;
  const VariableTable& vars_;
  std::vector<VarId> bound_;
  Clock::time_point deadline_;
  std::unordered_set<Clause, ClauseHash> seen_;
};

}  // namespace

Formula qe_free(const ExistsFormula& query, const EngineConfig& cfg) {
  std::vector<VarId> bound = query.bound;
  std::sort(bound.begin(), bound.end());
  for (const auto& a : atoms_of(query.matrix)) {
    for (VarId v : bound) {
      if (a.lhs.degree_in(v) > EngineConfig::kMaxVsDegree) {
        throw DegreeExceeded("vs-degree-exceeded: " + query.vars.name(v) + " has degree " +
                             std::to_string(a.lhs.degree_in(v)) + " in " + to_text(a, query.vars));
      }
    }
  }
  if (bound.empty()) return simplify(query.matrix);
  Eliminator elim(cfg, query.vars, bound, Clock::now() + cfg.deadline);
  std::vector<Clause> result;
  for (const auto& clause : to_dnf(query.matrix, cfg.clause_cap)) elim.run(clause, result);
  return simplify(from_dnf(result));
}

}  // namespace econqe
