#include "econqe/formula.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "econqe/error.hpp"

namespace econqe {

// ----------------------------------------------------------- VariableTable

VariableTable::VariableTable(const std::vector<std::string>& names) {
  for (const auto& n : names) add(n);
}

VarId VariableTable::add(const std::string& name) {
  if (index_.count(name) != 0) throw Error("variable '" + name + "' declared twice");
  const auto id = static_cast<VarId>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  if (order_) order_->push_back(id);
  return id;
}

VarId VariableTable::intern(const std::string& name) {
  if (auto id = find(name)) return *id;
  return add(name);
}

std::optional<VarId> VariableTable::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarId VariableTable::at(const std::string& name) const {
  if (auto id = find(name)) return *id;
  throw Error("undeclared variable '" + name + "'");
}

void VariableTable::set_suggested_order(std::vector<VarId> order) {
  std::vector<VarId> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  bool ok = sorted.size() == names_.size();
  for (std::size_t i = 0; ok && i < sorted.size(); ++i) ok = sorted[i] == i;
  if (!ok) throw Error("suggested order is not a permutation of the variables");
  order_ = std::move(order);
}

// --------------------------------------------------------------- relations

Rel negate(Rel rel) {
  switch (rel) {
    case Rel::Lt: return Rel::Ge;
    case Rel::Le: return Rel::Gt;
    case Rel::Eq: return Rel::Ne;
    case Rel::Ne: return Rel::Eq;
    case Rel::Ge: return Rel::Lt;
    case Rel::Gt: return Rel::Le;
  }
  return rel;
}

Rel mirror(Rel rel) {
  switch (rel) {
    case Rel::Lt: return Rel::Gt;
    case Rel::Le: return Rel::Ge;
    case Rel::Ge: return Rel::Le;
    case Rel::Gt: return Rel::Lt;
    default: return rel;
  }
}

const char* symbol(Rel rel) {
  switch (rel) {
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
    case Rel::Eq: return "=";
    case Rel::Ne: return "!=";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
  }
  return "?";
}

SignSet signs_of(Rel rel) {
  switch (rel) {
    case Rel::Lt: return kNegative;
    case Rel::Le: return kNegative | kZero;
    case Rel::Eq: return kZero;
    case Rel::Ne: return kNegative | kPositive;
    case Rel::Ge: return kZero | kPositive;
    case Rel::Gt: return kPositive;
  }
  return 0;
}

std::optional<Rel> rel_of(SignSet signs) {
  for (Rel r : {Rel::Lt, Rel::Le, Rel::Eq, Rel::Ne, Rel::Ge, Rel::Gt}) {
    if (signs_of(r) == signs) return r;
  }
  return std::nullopt;
}

bool holds(Rel rel, int sign) {
  const SignSet bit = sign < 0 ? kNegative : (sign == 0 ? kZero : kPositive);
  return (signs_of(rel) & bit) != 0;
}

std::variant<Atom, bool> canonical_atom(const Polynomial& p, Rel rel) {
  if (p.is_constant()) return holds(rel, sgn(p.constant_term()));
  Polynomial q = p.scaled(1 / p.content());
  if (q.leading_coefficient() < 0) {
    q = -q;
    rel = mirror(rel);
  }
  return Atom{std::move(q), rel};
}

// ----------------------------------------------------------------- Formula

struct Formula::Node {
  Kind kind;
  std::optional<Atom> atom;
  std::vector<Formula> children;
  std::size_t hash;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Formula::Formula() : Formula(truth()) {}

Formula Formula::truth() {
  static const auto node = std::make_shared<const Node>(Node{Kind::True, std::nullopt, {}, 0x51});
  return Formula(node);
}

Formula Formula::falsity() {
  static const auto node = std::make_shared<const Node>(Node{Kind::False, std::nullopt, {}, 0x52});
  return Formula(node);
}

Formula Formula::atom(const Polynomial& p, Rel rel) {
  auto c = canonical_atom(p, rel);
  if (auto* b = std::get_if<bool>(&c)) return constant(*b);
  return of(std::get<Atom>(c));
}

Formula Formula::of(const Atom& atom) {
  const std::size_t h = mix(atom.lhs.hash(), static_cast<std::size_t>(atom.rel) + 7);
  return Formula(std::make_shared<const Node>(Node{Kind::Atom, atom, {}, h}));
}

Formula Formula::negation(const Formula& child) {
  if (child.is_true()) return falsity();
  if (child.is_false()) return truth();
  return Formula(std::make_shared<const Node>(Node{Kind::Not, std::nullopt, {child}, mix(0x53, child.hash())}));
}

namespace {

Formula junction(Formula::Kind kind, std::vector<Formula> children, auto make) {
  const bool is_and = kind == Formula::Kind::And;
  std::vector<Formula> flat;
  flat.reserve(children.size());
  for (auto& c : children) {
    if (c.is_true()) {
      if (is_and) continue;
      return Formula::truth();
    }
    if (c.is_false()) {
      if (!is_and) continue;
      return Formula::falsity();
    }
    if (c.kind() == kind) {
      for (const auto& g : c.children()) flat.push_back(g);
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.empty()) return Formula::constant(is_and);
  if (flat.size() == 1) return flat.front();
  return make(std::move(flat));
}

}  // namespace

Formula Formula::conj(std::vector<Formula> children) {
  return junction(Kind::And, std::move(children), [](std::vector<Formula> flat) {
    std::size_t h = 0x54;
    for (const auto& c : flat) h = mix(h, c.hash());
    return Formula(std::make_shared<const Node>(Node{Kind::And, std::nullopt, std::move(flat), h}));
  });
}

Formula Formula::disj(std::vector<Formula> children) {
  return junction(Kind::Or, std::move(children), [](std::vector<Formula> flat) {
    std::size_t h = 0x55;
    for (const auto& c : flat) h = mix(h, c.hash());
    return Formula(std::make_shared<const Node>(Node{Kind::Or, std::nullopt, std::move(flat), h}));
  });
}

Formula Formula::implies(const Formula& lhs, const Formula& rhs) { return disj({negation(lhs), rhs}); }

Formula::Kind Formula::kind() const noexcept { return node_->kind; }

const Atom& Formula::as_atom() const {
  if (!node_->atom) throw Error("formula is not an atom");
  return *node_->atom;
}

std::span<const Formula> Formula::children() const noexcept { return node_->children; }

std::size_t Formula::hash() const noexcept { return node_->hash; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind) return false;
  return a.node_->atom == b.node_->atom && a.node_->children == b.node_->children;
}

// ---------------------------------------------------------------- NNF/DNF

namespace {

Formula nnf(const Formula& f, bool negated) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return Formula::constant(f.is_true() != negated);
    case Formula::Kind::Atom: {
      if (!negated) return f;
      const Atom& a = f.as_atom();
      return Formula::of(Atom{a.lhs, negate(a.rel)});
    }
    case Formula::Kind::Not:
      return nnf(f.children()[0], !negated);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.children().size());
      for (const auto& c : f.children()) kids.push_back(nnf(c, negated));
      const bool as_and = (f.kind() == Formula::Kind::And) != negated;
      return as_and ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
  }
  return f;
}

bool contradictory(const Clause& clause) {
  for (std::size_t i = 0; i + 1 < clause.size(); ++i) {
    SignSet acc = signs_of(clause[i].rel);
    for (std::size_t j = i + 1; j < clause.size() && clause[j].lhs == clause[i].lhs; ++j) {
      acc &= signs_of(clause[j].rel);
      if (acc == 0) return true;
    }
  }
  return false;
}

struct ClauseHash {
  std::size_t operator()(const Clause& c) const noexcept {
    std::size_t h = c.size();
    for (const auto& a : c) h = mix(h, mix(a.lhs.hash(), static_cast<std::size_t>(a.rel)));
    return h;
  }
};

class DnfBuilder {
 public:
  explicit DnfBuilder(std::size_t cap) : cap_(cap) {}

  std::vector<Clause> build(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::True: return {Clause{}};
      case Formula::Kind::False: return {};
      case Formula::Kind::Atom: return {Clause{f.as_atom()}};
      case Formula::Kind::Not: throw Error("to_dnf expects a formula in NNF");
      case Formula::Kind::Or: {
        std::vector<Clause> out;
        std::unordered_set<Clause, ClauseHash> seen;
        for (const auto& c : f.children()) {
          for (auto& clause : build(c)) {
            if (seen.insert(clause).second) {
              out.push_back(std::move(clause));
              check(out.size());
            }
          }
        }
        return out;
      }
      case Formula::Kind::And: {
        std::vector<Clause> acc{Clause{}};
        for (const auto& c : f.children()) {
          const auto part = build(c);
          std::vector<Clause> next;
          std::unordered_set<Clause, ClauseHash> seen;
          for (const auto& left : acc) {
            for (const auto& right : part) {
              Clause merged;
              merged.reserve(left.size() + right.size());
              std::set_union(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(merged));
              if (contradictory(merged)) continue;
              if (seen.insert(merged).second) {
                next.push_back(std::move(merged));
                check(next.size());
              }
            }
          }
          acc = std::move(next);
          if (acc.empty()) break;
        }
        return acc;
      }
    }
    return {};
  }

 private:
  void check(std::size_t n) const {
    if (n > cap_) throw ClauseCapExceeded("DNF exceeds " + std::to_string(cap_) + " clauses");
  }
  std::size_t cap_;
};

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, false); }

std::vector<Clause> to_dnf(const Formula& f, std::size_t max_clauses) {
  return DnfBuilder(max_clauses).build(to_nnf(f));
}

Formula from_clause(const Clause& clause) {
  std::vector<Formula> kids;
  kids.reserve(clause.size());
  for (const auto& a : clause) kids.push_back(Formula::of(a));
  return Formula::conj(std::move(kids));
}

Formula from_dnf(const std::vector<Clause>& clauses) {
  std::vector<Formula> kids;
  kids.reserve(clauses.size());
  for (const auto& c : clauses) kids.push_back(from_clause(c));
  return Formula::disj(std::move(kids));
}

// -------------------------------------------------------------- evaluation

namespace {

bool eval_atom(const Atom& a, const Point& point) { return holds(a.rel, sgn(a.lhs.evaluate(point))); }

}  // namespace

bool evaluate_at(const Formula& f, const Point& point) {
  switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom: return eval_atom(f.as_atom(), point);
    case Formula::Kind::Not: return !evaluate_at(f.children()[0], point);
    case Formula::Kind::And:
      return std::all_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return evaluate_at(c, point); });
    case Formula::Kind::Or:
      return std::any_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return evaluate_at(c, point); });
  }
  return false;
}

bool evaluate_at(const Clause& clause, const Point& point) {
  return std::all_of(clause.begin(), clause.end(), [&](const Atom& a) { return eval_atom(a, point); });
}

// ----------------------------------------------------------- simplification

std::optional<Clause> merge_clause(const Clause& clause) {
  Clause out;
  for (std::size_t i = 0; i < clause.size();) {
    SignSet acc = signs_of(clause[i].rel);
    std::size_t j = i + 1;
    for (; j < clause.size() && clause[j].lhs == clause[i].lhs; ++j) acc &= signs_of(clause[j].rel);
    if (acc == 0) return std::nullopt;
    out.push_back(Atom{clause[i].lhs, *rel_of(acc)});
    i = j;
  }
  return out;
}

namespace {

Formula simplify_nnf(const Formula& f) {
  if (f.kind() != Formula::Kind::And && f.kind() != Formula::Kind::Or) return f;
  const bool is_and = f.kind() == Formula::Kind::And;
  std::vector<Formula> kids;
  for (const auto& c : f.children()) kids.push_back(simplify_nnf(c));
  Formula flat = is_and ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
  if (flat.kind() != f.kind()) return flat;

  std::map<Polynomial, SignSet> atoms;
  std::vector<Formula> others;
  std::unordered_set<Formula> seen;
  for (const auto& c : flat.children()) {
    if (c.kind() == Formula::Kind::Atom) {
      const Atom& a = c.as_atom();
      auto [it, fresh] = atoms.emplace(a.lhs, signs_of(a.rel));
      if (!fresh) it->second = is_and ? (it->second & signs_of(a.rel)) : (it->second | signs_of(a.rel));
    } else if (seen.insert(c).second) {
      others.push_back(c);
    }
  }
  std::vector<Formula> out;
  for (const auto& [lhs, signs] : atoms) {
    if (signs == 0) return Formula::falsity();  // only reachable for conjunctions
    if (signs == (kNegative | kZero | kPositive)) return Formula::truth();
    out.push_back(Formula::of(Atom{lhs, *rel_of(signs)}));
  }
  for (auto& o : others) out.push_back(std::move(o));
  return is_and ? Formula::conj(std::move(out)) : Formula::disj(std::move(out));
}

void collect_atoms(const Formula& f, std::vector<Atom>& out) {
  if (f.kind() == Formula::Kind::Atom) {
    out.push_back(f.as_atom());
    return;
  }
  for (const auto& c : f.children()) collect_atoms(c, out);
}

}  // namespace

Formula simplify(const Formula& f) { return simplify_nnf(to_nnf(f)); }

std::vector<Atom> atoms_of(const Formula& f) {
  std::vector<Atom> out;
  collect_atoms(f, out);
  return out;
}

std::vector<VarId> variables_of(const Formula& f) { return variables_of(atoms_of(f)); }

std::vector<VarId> variables_of(const Clause& clause) {
  std::set<VarId> vars;
  for (const auto& a : clause) {
    for (VarId v : a.lhs.variables()) vars.insert(v);
  }
  return {vars.begin(), vars.end()};
}

FormulaMetrics formula_metrics(const Formula& f) {
  FormulaMetrics m;
  const auto atoms = atoms_of(f);
  m.atom_count = atoms.size();
  std::set<Polynomial> polys;
  for (const auto& a : atoms) polys.insert(a.lhs);
  m.polynomial_count = polys.size();
  Rational degree_sum = 0;
  for (const auto& p : polys) {
    m.max_total_degree = std::max(m.max_total_degree, p.total_degree());
    degree_sum += p.total_degree();
    for (VarId v : p.variables()) {
      auto& d = m.max_degree_per_variable[v];
      d = std::max(d, p.degree_in(v));
      m.max_variable_degree = std::max(m.max_variable_degree, d);
    }
  }
  m.variable_count = m.max_degree_per_variable.size();
  if (!polys.empty()) m.mean_total_degree = degree_sum / static_cast<long>(polys.size());
  return m;
}

// --------------------------------------------------------------- printing

std::string to_text(const Atom& atom, const VariableTable& vars) {
  return atom.lhs.to_string(vars.names()) + " " + symbol(atom.rel) + " 0";
}

namespace {

void print(const Formula& f, const VariableTable& vars, std::ostream& out, int parent_prec) {
  // Precedence: or = 1, and = 2, not/atoms = 3.
  switch (f.kind()) {
    case Formula::Kind::True: out << "true"; return;
    case Formula::Kind::False: out << "false"; return;
    case Formula::Kind::Atom: out << to_text(f.as_atom(), vars); return;
    case Formula::Kind::Not: {
      const auto& c = f.children()[0];
      out << "not ";
      const bool wrap = c.kind() == Formula::Kind::And || c.kind() == Formula::Kind::Or ||
                        c.kind() == Formula::Kind::Atom;
      if (wrap) out << "(";
      print(c, vars, out, 3);
      if (wrap) out << ")";
      return;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const int prec = f.kind() == Formula::Kind::And ? 2 : 1;
      if (prec < parent_prec) out << "(";
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out << (prec == 2 ? " and " : " or ");
        first = false;
        print(c, vars, out, prec + 1);
      }
      if (prec < parent_prec) out << ")";
      return;
    }
  }
}

}  // namespace

std::string to_text(const Formula& f, const VariableTable& vars) {
  std::ostringstream out;
  print(f, vars, out, 0);
  return out.str();
}

}  // namespace econqe
