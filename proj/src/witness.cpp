#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "econqe/decision.hpp"
#include "econqe/error.hpp"
#include "vs_internal.hpp"

namespace econqe {

namespace {

const std::vector<Rational>& palette() {
  static const std::vector<Rational> values = [] {
    std::set<Rational> s;
    for (int i = -10; i <= 10; ++i) s.insert(Rational(i));
    for (int k = -20; k <= 20; ++k) {
      Rational half(k, 2);
      half.canonicalize();
      Rational third(k, 3);
      third.canonicalize();
      s.insert(half);
      s.insert(third);
    }
    return std::vector<Rational>(s.begin(), s.end());
  }();
  return values;
}

/// Interval constraints read off atoms of the form a·x + b rel 0.
struct Bounds {
  std::optional<Rational> lower;
  bool lower_strict = false;
  std::optional<Rational> upper;
  bool upper_strict = false;
  std::optional<Rational> fixed;
  std::vector<Rational> excluded;

  bool admits(const Rational& v) const {
    if (fixed && v != *fixed) return false;
    if (lower && (v < *lower || (lower_strict && v == *lower))) return false;
    if (upper && (v > *upper || (upper_strict && v == *upper))) return false;
    return std::find(excluded.begin(), excluded.end(), v) == excluded.end();
  }
  bool empty() const { return !fixed && !lower && !upper && excluded.empty(); }
};

std::map<VarId, Bounds> read_bounds(const Clause& clause) {
  std::map<VarId, Bounds> out;
  for (const auto& a : clause) {
    const auto vars = a.lhs.variables();
    if (vars.size() != 1 || a.lhs.total_degree() != 1) continue;
    const VarId x = vars[0];
    const auto c = a.lhs.coefficients_in(x);
    const Rational slope = c[1].constant_value();  // positive by canonicalization
    const Rational at = -c[0].constant_term() / slope;
    Bounds& b = out[x];
    auto tighten_lower = [&](bool strict) {
      if (!b.lower || at > *b.lower || (at == *b.lower && strict)) {
        b.lower = at;
        b.lower_strict = strict;
      }
    };
    auto tighten_upper = [&](bool strict) {
      if (!b.upper || at < *b.upper || (at == *b.upper && strict)) {
        b.upper = at;
        b.upper_strict = strict;
      }
    };
    switch (a.rel) {
      case Rel::Lt: tighten_upper(true); break;
      case Rel::Le: tighten_upper(false); break;
      case Rel::Gt: tighten_lower(true); break;
      case Rel::Ge: tighten_lower(false); break;
      case Rel::Eq: b.fixed = at; break;
      case Rel::Ne: b.excluded.push_back(at); break;
    }
  }
  return out;
}

class Sampler {
 public:
  Sampler(const Clause& clause, std::mt19937_64& rng) : clause_(clause), rng_(rng), bounds_(read_bounds(clause)) {}

  /// One randomized attempt at a satisfying point; nullopt on early failure.
  std::optional<Point> attempt() {
    Point assigned;
    std::vector<std::pair<VarId, Polynomial>> defined;
    std::vector<Polynomial> residuals;
    for (const auto& a : clause_) {
      if (a.rel == Rel::Eq) residuals.push_back(a.lhs);
    }
    std::set<VarId> open;
    for (VarId v : variables_of(clause_)) open.insert(v);

    auto substitute_all = [&](VarId v, const Polynomial& value) {
      for (auto& r : residuals) r = r.substitute(v, value);
      for (auto& [dv, expr] : defined) expr = expr.substitute(v, value);
    };

    for (;;) {
      std::vector<Polynomial> live;
      for (auto& r : residuals) {
        if (r.is_zero()) continue;
        if (r.is_constant()) return std::nullopt;
        live.push_back(std::move(r));
      }
      residuals = std::move(live);
      if (residuals.empty()) break;

      // Solve an equation for a variable that occurs linearly with a
      // constant coefficient; prefer variables without bound information.
      std::vector<std::tuple<bool, std::size_t, VarId>> options;
      for (std::size_t i = 0; i < residuals.size(); ++i) {
        for (VarId v : residuals[i].variables()) {
          if (residuals[i].degree_in(v) != 1) continue;
          if (!residuals[i].coefficients_in(v)[1].is_constant()) continue;
          options.emplace_back(bounds_.count(v) != 0, i, v);
        }
      }
      if (!options.empty()) {
        std::shuffle(options.begin(), options.end(), rng_);
        std::stable_sort(options.begin(), options.end(),
                         [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
        const auto [unused, idx, v] = options.front();
        const auto c = residuals[idx].coefficients_in(v);
        const Polynomial expr = (-c[0]).scaled(1 / c[1].constant_value());
        substitute_all(v, expr);
        defined.emplace_back(v, expr);
        open.erase(v);
        continue;
      }

      // Univariate quadratics with rational roots.
      bool solved = false;
      for (const auto& r : residuals) {
        const auto vars = r.variables();
        if (vars.size() != 1 || r.degree_in(vars[0]) != 2) continue;
        const auto c = r.coefficients_in(vars[0]);
        const Rational disc = c[1].constant_term() * c[1].constant_term() -
                              4 * c[2].constant_value() * c[0].constant_term();
        const auto root = detail::rational_sqrt(disc);
        if (!root) continue;
        const Rational sign = (rng_() & 1U) ? Rational(1) : Rational(-1);
        const Rational value = (-c[1].constant_term() + sign * *root) / (2 * c[2].constant_value());
        assign(vars[0], value, assigned, open, substitute_all);
        solved = true;
        break;
      }
      if (solved) continue;

      // Sample the variable appearing in the most nonlinear monomials.
      std::map<VarId, std::size_t> score;
      for (const auto& r : residuals) {
        for (const auto& t : r.terms()) {
          if (t.monomial.total_degree() < 2) continue;
          for (const auto& f : t.monomial.factors()) score[f.first] += 1;
        }
      }
      if (score.empty()) return std::nullopt;
      std::vector<VarId> best;
      std::size_t top = 0;
      for (const auto& [v, s] : score) {
        if (s > top) {
          top = s;
          best.clear();
        }
        if (s == top) best.push_back(v);
      }
      const VarId v = best[rng_() % best.size()];
      assign(v, sample(v), assigned, open, substitute_all);
    }

    // The remaining variables are free; redraw them a few times so that the
    // back-substituted values also respect their bounds.
    std::vector<VarId> rest;
    for (VarId v : open) {
      if (std::none_of(defined.begin(), defined.end(), [&](const auto& d) { return d.first == v; })) rest.push_back(v);
    }
    Point candidate;
    for (int attempt = 0; attempt < kRedraws; ++attempt) {
      candidate = assigned;
      for (VarId v : rest) candidate[v] = sample(v);
      for (auto it = defined.rbegin(); it != defined.rend(); ++it) {
        candidate[it->first] = it->second.evaluate(candidate);
      }
      if (within_bounds(candidate)) break;
    }
    return candidate;
  }

 private:
  template <typename F>
  void assign(VarId v, const Rational& value, Point& assigned, std::set<VarId>& open, F& substitute_all) {
    assigned[v] = value;
    open.erase(v);
    substitute_all(v, Polynomial(value));
  }

  static constexpr int kRedraws = 16;

  bool within_bounds(const Point& p) const {
    for (const auto& [v, b] : bounds_) {
      auto it = p.find(v);
      if (it != p.end() && !b.admits(it->second)) return false;
    }
    return true;
  }

  Rational sample(VarId v) {
    auto it = bounds_.find(v);
    if (it == bounds_.end() || it->second.empty()) return palette()[rng_() % palette().size()];
    const Bounds& b = it->second;
    if (b.fixed) return *b.fixed;
    std::vector<Rational> ok;
    for (const auto& p : palette()) {
      if (b.admits(p)) ok.push_back(p);
    }
    if (!ok.empty()) return ok[rng_() % ok.size()];
    // Narrow or far-away interval: fall back to a point built from the bounds.
    Rational candidate;
    if (b.lower && b.upper) {
      for (int k = 2; k < 66; ++k) {
        candidate = *b.lower + (*b.upper - *b.lower) / k;
        if (b.admits(candidate)) return candidate;
      }
      return candidate;
    }
    if (b.lower) {
      candidate = *b.lower + 1;
    } else if (b.upper) {
      candidate = *b.upper - 1;
    } else {
      candidate = 0;
    }
    // Step away from the bound across excluded points.
    const Rational step = b.upper ? Rational(-1, 7) : Rational(1, 7);
    for (int k = 0; k < 64 && !b.admits(candidate); ++k) candidate += step;
    return candidate;
  }

  const Clause& clause_;
  std::mt19937_64& rng_;
  std::map<VarId, Bounds> bounds_;
};

}  // namespace

Verdict witness_search(const ExistsFormula& query, const EngineConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Clause> clauses;
  try {
    for (auto& c : to_dnf(query.matrix, cfg.clause_cap)) {
      if (auto merged = merge_clause(c)) clauses.push_back(std::move(*merged));
    }
  } catch (const ClauseCapExceeded&) {
    return Verdict::unknown("clause-cap");
  }
  std::mt19937_64 rng(cfg.seed);
  auto complete = [&](Point p) {
    for (VarId v : query.bound) p.try_emplace(v, 0);
    for (VarId v : variables_of(query.matrix)) p.try_emplace(v, 0);
    return p;
  };
  for (std::size_t round = 0; round < std::max<std::size_t>(cfg.sample_count, 1); ++round) {
    for (const auto& clause : clauses) {
      if (std::chrono::steady_clock::now() - start > cfg.deadline) return Verdict::unknown("timeout");
      Sampler sampler(clause, rng);
      auto point = sampler.attempt();
      if (!point) continue;
      Point full = complete(std::move(*point));
      if (evaluate_at(query.matrix, full)) return Verdict::sat(std::move(full));
    }
  }
  return Verdict::unknown("no-witness-found");
}

}  // namespace econqe
