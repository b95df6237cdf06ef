// Virtual substitution for variables of degree at most two: elimination sets
// of -inf, exact roots of weak atoms, and root + epsilon for strict atoms.

#include <algorithm>
#include <map>
#include <set>

#include "econqe/error.hpp"
#include "vs_internal.hpp"

namespace econqe {

namespace {

Formula atom(const Polynomial& p, Rel rel) { return Formula::atom(p, rel); }

Formula all_zero(const std::vector<Polynomial>& coeffs) {
  std::vector<Formula> parts;
  for (const auto& c : coeffs) parts.push_back(atom(c, Rel::Eq));
  return Formula::conj(std::move(parts));
}

/// sign(A + B·√r) rel 0, assuming r ≥ 0.
Formula sqrt_sign(const Polynomial& a, const Polynomial& b, const Polynomial& r, Rel rel) {
  if (b.is_zero() || r.is_zero()) return atom(a, rel);
  if (rel == Rel::Gt) return sqrt_sign(-a, -b, r, Rel::Lt);
  if (rel == Rel::Ge) return sqrt_sign(-a, -b, r, Rel::Le);
  const Polynomial delta = a * a - b * b * r;
  switch (rel) {
    case Rel::Eq:
      return Formula::conj({atom(a * b, Rel::Le), atom(delta, Rel::Eq)});
    case Rel::Ne:
      return Formula::disj({atom(a * b, Rel::Gt), atom(delta, Rel::Ne)});
    case Rel::Lt:
      return Formula::disj({Formula::conj({atom(a, Rel::Lt), atom(delta, Rel::Gt)}),
                            Formula::conj({atom(b, Rel::Le), Formula::disj({atom(a, Rel::Lt), atom(delta, Rel::Lt)})})});
    case Rel::Le:
      return Formula::disj({Formula::conj({atom(a, Rel::Le), atom(delta, Rel::Ge)}),
                            Formula::conj({atom(b, Rel::Le), atom(delta, Rel::Le)})});
    default:
      break;
  }
  return Formula::falsity();
}

/// f(root) rel 0 for f of degree ≤ 2 in x; denominators cleared with an even
/// power of the denominator so the sign is preserved.
Formula exact_sign(const Polynomial& f, VarId x, const RootExpression& root, Rel rel) {
  const auto coeffs = f.coefficients_in(x);
  const std::size_t d = coeffs.size() - 1;
  if (d == 0) return atom(f, rel);
  const Polynomial& p = root.constant;
  const Polynomial& q = root.sqrt_coefficient;
  const Polynomial& r = root.radicand;
  const Polynomial& s = root.denominator;
  // (p + q√r)^k = P + Q√r
  Polynomial pk = 1;
  Polynomial qk;
  std::vector<Polynomial> s_pow{Polynomial(1)};
  for (std::size_t k = 1; k <= d; ++k) s_pow.push_back(s_pow.back() * s);
  Polynomial a;
  Polynomial b;
  for (std::size_t k = 0; k <= d; ++k) {
    if (!coeffs[k].is_zero()) {
      a += coeffs[k] * pk * s_pow[d - k];
      if (!qk.is_zero()) b += coeffs[k] * qk * s_pow[d - k];
    }
    if (k < d) {
      Polynomial next_p = pk * p;
      Polynomial next_q = pk * q;
      if (!qk.is_zero()) {
        next_p += qk * q * r;
        next_q += qk * p;
      }
      pk = std::move(next_p);
      qk = std::move(next_q);
    }
  }
  // a + b√r = s^d · f(root); an odd d needs the sign of s.
  if (d % 2 == 0 || rel == Rel::Eq || rel == Rel::Ne) return sqrt_sign(a, b, r, rel);
  if (s.is_constant()) {
    return s.constant_value() > 0 ? sqrt_sign(a, b, r, rel) : sqrt_sign(-a, -b, r, rel);
  }
  return Formula::disj({Formula::conj({atom(s, Rel::Gt), sqrt_sign(a, b, r, rel)}),
                        Formula::conj({atom(s, Rel::Lt), sqrt_sign(-a, -b, r, rel)})});
}

Formula epsilon_sign(const Polynomial& f, VarId x, const RootExpression& root, Rel rel) {
  if (f.degree_in(x) == 0) return atom(f, rel);
  switch (rel) {
    case Rel::Eq: return all_zero(f.coefficients_in(x));
    case Rel::Ne: return Formula::negation(all_zero(f.coefficients_in(x)));
    case Rel::Lt:
    case Rel::Gt:
      return Formula::disj({exact_sign(f, x, root, rel),
                            Formula::conj({exact_sign(f, x, root, Rel::Eq), epsilon_sign(f.derivative(x), x, root, rel)})});
    case Rel::Le:
      return Formula::disj({epsilon_sign(f, x, root, Rel::Lt), all_zero(f.coefficients_in(x))});
    case Rel::Ge:
      return Formula::disj({epsilon_sign(f, x, root, Rel::Gt), all_zero(f.coefficients_in(x))});
  }
  return Formula::falsity();
}

/// Sign of f as x → -inf, relative to `rel`.
Formula minus_infinity_sign(const std::vector<Polynomial>& coeffs, std::size_t top, Rel rel) {
  if (rel == Rel::Eq) return all_zero({coeffs.begin(), coeffs.begin() + static_cast<long>(top) + 1});
  if (rel == Rel::Ne) return Formula::negation(all_zero({coeffs.begin(), coeffs.begin() + static_cast<long>(top) + 1}));
  if (rel == Rel::Le || rel == Rel::Ge) {
    const Rel strict = rel == Rel::Le ? Rel::Lt : Rel::Gt;
    return Formula::disj({minus_infinity_sign(coeffs, top, strict), minus_infinity_sign(coeffs, top, Rel::Eq)});
  }
  const Polynomial lead = top % 2 == 0 ? coeffs[top] : -coeffs[top];
  if (top == 0) return atom(lead, rel);
  return Formula::disj({atom(lead, rel), Formula::conj({atom(coeffs[top], Rel::Eq), minus_infinity_sign(coeffs, top - 1, rel)})});
}

Formula substitute_atom(const Atom& a, VarId x, const TestPoint& tp) {
  if (a.lhs.degree_in(x) == 0) return Formula::of(a);
  switch (tp.kind) {
    case TestPoint::Kind::MinusInfinity: {
      const auto coeffs = a.lhs.coefficients_in(x);
      return minus_infinity_sign(coeffs, coeffs.size() - 1, a.rel);
    }
    case TestPoint::Kind::EpsilonAbove: return epsilon_sign(a.lhs, x, tp.root, a.rel);
    case TestPoint::Kind::ExactRoot: return exact_sign(a.lhs, x, tp.root, a.rel);
  }
  return Formula::falsity();
}

void check_degree(const Atom& a, VarId x, const VariableTable* names) {
  if (a.lhs.degree_in(x) > EngineConfig::kMaxVsDegree) {
    std::string var = names ? names->name(x) : "#" + std::to_string(x);
    std::string text = names ? to_text(a, *names) : "atom";
    throw DegreeExceeded("vs-degree-exceeded: " + var + " has degree " + std::to_string(a.lhs.degree_in(x)) + " in " +
                         text);
  }
}

/// Root test points of `p` (degree 1 or 2 in x).
std::vector<TestPoint> roots_of(const Polynomial& p, VarId x, TestPoint::Kind kind) {
  const auto c = p.coefficients_in(x);
  std::vector<TestPoint> out;
  auto push = [&](RootExpression root, Formula guard) {
    if (guard.is_false()) return;
    out.push_back(TestPoint{kind, std::move(root), std::move(guard)});
  };
  if (c.size() == 2) {
    push(RootExpression{-c[0], {}, {}, c[1]}, atom(c[1], Rel::Ne));
  } else if (c.size() == 3) {
    push(RootExpression{-c[0], {}, {}, c[1]}, Formula::conj({atom(c[2], Rel::Eq), atom(c[1], Rel::Ne)}));
    const Polynomial disc = c[1] * c[1] - Polynomial(4) * c[2] * c[0];
    const Formula guard = Formula::conj({atom(c[2], Rel::Ne), atom(disc, Rel::Ge)});
    push(RootExpression{-c[1], Polynomial(1), disc, Polynomial(2) * c[2]}, guard);
    push(RootExpression{-c[1], Polynomial(-1), disc, Polynomial(2) * c[2]}, guard);
  }
  return out;
}

bool same_point(const TestPoint& a, const TestPoint& b) {
  return a.kind == b.kind && a.root == b.root && a.guard == b.guard;
}

void add_unique(std::vector<TestPoint>& set, TestPoint tp) {
  for (const auto& existing : set) {
    if (same_point(existing, tp)) return;
  }
  set.push_back(std::move(tp));
}

}  // namespace

Formula substitute(const Formula& f, VarId x, const TestPoint& tp) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Atom: return substitute_atom(f.as_atom(), x, tp);
    case Formula::Kind::Not: return substitute(to_nnf(f), x, tp);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> kids;
      for (const auto& c : f.children()) kids.push_back(substitute(c, x, tp));
      return f.kind() == Formula::Kind::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
  }
  return f;
}

std::vector<TestPoint> elimination_set(const Formula& f, VarId x) {
  std::vector<TestPoint> set{TestPoint{TestPoint::Kind::MinusInfinity, {}, Formula::truth()}};
  std::set<Atom> seen;
  for (const auto& a : atoms_of(to_nnf(f))) {
    if (a.lhs.degree_in(x) == 0 || !seen.insert(a).second) continue;
    check_degree(a, x, nullptr);
    const bool weak = a.rel == Rel::Eq || a.rel == Rel::Le || a.rel == Rel::Ge;
    for (auto& tp : roots_of(a.lhs, x, weak ? TestPoint::Kind::ExactRoot : TestPoint::Kind::EpsilonAbove)) {
      add_unique(set, std::move(tp));
    }
  }
  return set;
}

Formula vs_eliminate_var(const Formula& f, VarId x, const VariableTable* names) {
  const Formula g = simplify(f);
  for (const auto& a : atoms_of(g)) {
    if (a.lhs.degree_in(x) > 0) check_degree(a, x, names);
  }
  if (g.kind() == Formula::Kind::Atom || g.kind() == Formula::Kind::And) {
    // Conjunctions of atoms get the clause treatment, including Gauss pivots.
    bool clause = true;
    for (const auto& c : g.children()) clause = clause && c.kind() == Formula::Kind::Atom;
    if (clause) {
      std::vector<Atom> atoms = atoms_of(g);
      std::sort(atoms.begin(), atoms.end());
      std::vector<Formula> parts;
      for (auto& b : detail::clause_branches(atoms, x, names)) {
        parts.push_back(b.point ? b.formula : vs_eliminate_var(b.formula, x, names));
      }
      return simplify(Formula::disj(std::move(parts)));
    }
  }
  std::vector<Formula> parts;
  for (const auto& tp : elimination_set(g, x)) {
    parts.push_back(simplify(Formula::conj({tp.guard, substitute(g, x, tp)})));
  }
  return simplify(Formula::disj(std::move(parts)));
}

namespace detail {

std::vector<Branch> clause_branches(const std::vector<Atom>& clause, VarId x, const VariableTable* names) {
  std::vector<Formula> keep;
  std::vector<Atom> work;
  for (const auto& a : clause) {
    if (a.lhs.degree_in(x) == 0) {
      keep.push_back(Formula::of(a));
    } else {
      check_degree(a, x, names);
      work.push_back(a);
    }
  }
  const Formula outside = Formula::conj(keep);
  if (work.empty()) return {Branch{outside, TestPoint{}}};

  const Formula inside = from_clause(work);
  std::vector<Branch> out;
  auto emit = [&](const TestPoint& tp) {
    Formula f = simplify(Formula::conj({outside, tp.guard, substitute(inside, x, tp)}));
    if (!f.is_false()) out.push_back(Branch{std::move(f), tp});
  };

  // Gauss pivot: an equation in x confines x to its roots unless all of its
  // x-coefficients vanish.
  const Atom* pivot = nullptr;
  auto pivot_rank = [&](const Atom& a) {
    const auto c = a.lhs.coefficients_in(x);
    const bool constant_lead = c.back().is_constant();
    return std::tuple(c.size(), constant_lead ? 0 : 1, a.lhs.terms().size());
  };
  for (const auto& a : work) {
    if (a.rel != Rel::Eq) continue;
    if (!pivot || pivot_rank(a) < pivot_rank(*pivot)) pivot = &a;
  }
  if (pivot) {
    for (const auto& tp : roots_of(pivot->lhs, x, TestPoint::Kind::ExactRoot)) emit(tp);
    const auto c = pivot->lhs.coefficients_in(x);
    std::vector<Formula> vanish{outside, atom(c[0], Rel::Eq)};
    for (std::size_t k = 1; k < c.size(); ++k) vanish.push_back(atom(c[k], Rel::Eq));
    for (const auto& a : work) {
      if (&a != pivot) vanish.push_back(Formula::of(a));
    }
    Formula rest = simplify(Formula::conj(std::move(vanish)));
    if (!rest.is_false()) out.push_back(Branch{std::move(rest), std::nullopt});
    return out;
  }

  for (const auto& tp : elimination_set(inside, x)) emit(tp);
  return out;
}

std::optional<VarId> pick_variable(const std::vector<Atom>& clause, const std::vector<VarId>& candidates,
                                   const std::optional<std::vector<VarId>>& order) {
  std::map<VarId, std::pair<unsigned, std::size_t>> stats;
  std::set<VarId> cheap_pivot;
  for (VarId v : candidates) stats[v] = {0, 0};
  for (const auto& a : clause) {
    for (VarId v : a.lhs.variables()) {
      auto it = stats.find(v);
      if (it == stats.end()) continue;
      it->second.first = std::max(it->second.first, a.lhs.degree_in(v));
      it->second.second += 1;
      if (a.rel == Rel::Eq && a.lhs.degree_in(v) == 1 && a.lhs.coefficients_in(v)[1].is_constant()) {
        cheap_pivot.insert(v);
      }
    }
  }
  auto eligible = [&](VarId v) {
    const auto& s = stats.at(v);
    return s.second > 0 && s.first <= EngineConfig::kMaxVsDegree;
  };
  if (order) {
    for (VarId v : *order) {
      if (stats.count(v) && eligible(v)) return v;
    }
    return std::nullopt;
  }
  // Equations that are linear in v with a constant coefficient eliminate v
  // by plain substitution, so they go first.
  auto key = [&](VarId v) {
    const auto& s = stats.at(v);
    return std::tuple(cheap_pivot.count(v) ? 0 : 1, s.first, s.second, v);
  };
  std::optional<VarId> best;
  for (const auto& entry : stats) {
    const VarId v = entry.first;
    if (!eligible(v)) continue;
    if (!best || key(v) < key(*best)) best = v;
  }
  return best;
}

std::optional<Rational> rational_sqrt(const Rational& value) {
  if (value < 0) return std::nullopt;
  if (!mpz_perfect_square_p(value.get_num_mpz_t()) || !mpz_perfect_square_p(value.get_den_mpz_t())) {
    return std::nullopt;
  }
  Integer n;
  Integer d;
  mpz_sqrt(n.get_mpz_t(), value.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), value.get_den_mpz_t());
  Rational out(n, d);
  out.canonicalize();
  return out;
}

std::optional<Rational> root_value(const RootExpression& root, const Point& point) {
  const Rational den = root.denominator.evaluate(point);
  if (den == 0) return std::nullopt;
  Rational num = root.constant.evaluate(point);
  if (!root.sqrt_coefficient.is_zero()) {
    const auto s = rational_sqrt(root.radicand.evaluate(point));
    if (!s) return std::nullopt;
    num += root.sqrt_coefficient.evaluate(point) * *s;
  }
  return Rational(num / den);
}

}  // namespace detail

}  // namespace econqe
