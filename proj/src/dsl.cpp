#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

#include "econqe/encoders.hpp"
#include "econqe/error.hpp"
#include "econqe/problem.hpp"

namespace econqe {

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const std::size_t tl = line;
    const std::size_t tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '.' ||
                                src[j] == '\'')) {
        ++j;
      }
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::string s;
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\\' && j + 1 < src.size()) ++j;
        if (src[j] == '\n') throw ParseError("unterminated string", tl, tc);
        s += src[j++];
      }
      if (j >= src.size()) throw ParseError("unterminated string", tl, tc);
      out.push_back({Tok::String, s, tl, tc});
      advance(j + 1 - i);
      continue;
    }
    static const char* const two_char[] = {"<=", ">=", "!=", "=="};
    bool matched = false;
    for (const char* op : two_char) {
      if (src.substr(i, 2) == op) {
        out.push_back({Tok::Punct, std::string(op) == "==" ? "=" : op, tl, tc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("()+-*/^<>=,;").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s) {
  static const char* const words[] = {"problem", "vars",  "free", "order", "meta",  "assume", "hypothesis",
                                      "and",     "or",    "not",  "implies", "true", "false"};
  return std::any_of(std::begin(words), std::end(words), [&](const char* w) { return s == w; });
}

std::optional<Rel> rel_token(const Token& t) {
  if (t.kind != Tok::Punct) return std::nullopt;
  if (t.text == "<") return Rel::Lt;
  if (t.text == "<=") return Rel::Le;
  if (t.text == "=") return Rel::Eq;
  if (t.text == "!=") return Rel::Ne;
  if (t.text == ">=") return Rel::Ge;
  if (t.text == ">") return Rel::Gt;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view src, VariableTable& vars) : toks_(lex(src)), vars_(vars) {}

  TheoremProblem problem(std::string default_id) {
    TheoremProblem p;
    p.id = std::move(default_id);
    if (word("problem")) {
      next();
      if (peek().kind == Tok::String) p.id = next().text;
      semis();
    }
    std::vector<std::string> free_names;
    std::optional<std::vector<std::string>> order_names;
    for (;;) {
      if (word("vars")) {
        next();
        for (const auto& name : identifiers("vars")) {
          if (vars_.find(name)) fail("variable '" + name + "' declared twice");
          vars_.add(name);
        }
      } else if (word("free")) {
        next();
        for (const auto& name : identifiers("free")) free_names.push_back(name);
      } else if (word("order")) {
        next();
        order_names = identifiers("order");
      } else if (word("meta")) {
        next();
        const Token key = expect_ident("metadata key");
        if (peek().kind != Tok::String) fail("expected a quoted metadata value");
        p.metadata[key.text] = next().text;
      } else {
        break;
      }
      semis();
    }
    if (!word("assume")) fail("expected 'assume'");
    next();
    p.assumptions = formula();
    semis();
    if (!word("hypothesis")) fail("expected 'hypothesis'");
    next();
    p.hypothesis = formula();
    semis();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after hypothesis");

    for (const auto& name : free_names) {
      auto id = vars_.find(name);
      if (!id) fail("undeclared free variable '" + name + "'");
      p.free_vars.push_back(*id);
    }
    std::sort(p.free_vars.begin(), p.free_vars.end());
    p.free_vars.erase(std::unique(p.free_vars.begin(), p.free_vars.end()), p.free_vars.end());
    if (order_names) {
      std::vector<VarId> order;
      for (const auto& name : *order_names) {
        auto id = vars_.find(name);
        if (!id) fail("undeclared variable '" + name + "' in order");
        order.push_back(*id);
      }
      // Variables created by intrinsics after the order line go last.
      for (VarId v = 0; v < vars_.size(); ++v) {
        if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
      }
      try {
        vars_.set_suggested_order(std::move(order));
      } catch (const Error& e) {
        fail(e.what());
      }
    }
    p.vars = vars_;
    return p;
  }

  Formula standalone_formula() {
    Formula f = formula();
    semis();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
  bool punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(msg, t.line, t.column);
  }
  void expect(const char* p) {
    if (!punct(p)) fail(std::string("expected '") + p + "'" + (peek().kind == Tok::End ? " at end of input" : ""));
    next();
  }
  void semis() {
    while (punct(";")) next();
  }
  Token expect_ident(const char* what) {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail(std::string("expected ") + what);
    return next();
  }
  std::vector<std::string> identifiers(const char* context) {
    std::vector<std::string> names;
    while (peek().kind == Tok::Ident && !is_keyword(peek().text)) names.push_back(next().text);
    if (names.empty()) fail(std::string("expected identifiers after '") + context + "'");
    return names;
  }

  // formula := disj ("implies" formula)?
  Formula formula() {
    Formula lhs = disjunction();
    if (word("implies")) {
      next();
      return Formula::implies(lhs, formula());
    }
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (word("or")) {
      next();
      parts.push_back(conjunction());
    }
    return parts.size() == 1 ? parts[0] : Formula::disj(std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{unit()};
    while (word("and")) {
      next();
      parts.push_back(unit());
    }
    return parts.size() == 1 ? parts[0] : Formula::conj(std::move(parts));
  }

  Formula unit() {
    if (word("not")) {
      next();
      return Formula::negation(unit());
    }
    if (word("true")) {
      next();
      return Formula::truth();
    }
    if (word("false")) {
      next();
      return Formula::falsity();
    }
    if (word("gram_psd")) return gram_psd();
    if (word("nsd_minors")) return nsd_minors();
    if (punct("(")) {
      // Either a parenthesised formula or a polynomial that starts with '('.
      const std::size_t saved = pos_;
      bool is_chain = false;
      try {
        polynomial();
        is_chain = rel_token(peek()).has_value();
      } catch (const ParseError&) {
        is_chain = false;
      }
      pos_ = saved;
      if (!is_chain) {
        next();
        Formula f = formula();
        expect(")");
        return f;
      }
    }
    return atom_chain();
  }

  Formula atom_chain() {
    Polynomial lhs = polynomial();
    auto rel = rel_token(peek());
    if (!rel) fail("expected a relation (<, <=, =, !=, >=, >)");
    std::vector<Formula> atoms;
    while (rel) {
      next();
      Polynomial rhs = polynomial();
      atoms.push_back(Formula::atom(lhs - rhs, *rel));
      lhs = std::move(rhs);
      rel = rel_token(peek());
    }
    return atoms.size() == 1 ? atoms[0] : Formula::conj(std::move(atoms));
  }

  Formula gram_psd() {
    next();
    expect("(");
    std::vector<std::string> vectors{expect_ident("vector name").text};
    while (punct(",")) {
      next();
      vectors.push_back(expect_ident("vector name").text);
    }
    const Token& close = peek();
    expect(")");
    try {
      return gram_psd_constraints(vectors.size(), DotProductMap::declare(vectors, vars_));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail_at(close, e.what());
    }
  }

  Formula nsd_minors() {
    next();
    expect("(");
    if (peek().kind != Tok::Number) fail("expected the dimension");
    const Token dim_tok = next();
    const std::size_t n = std::stoul(dim_tok.text);
    std::vector<VarId> entries;
    while (punct(",")) {
      next();
      entries.push_back(vars_.intern(expect_ident("Hessian entry").text));
    }
    expect(")");
    try {
      if (n < 1 || n > 4) throw Error("nsd_minors supports dimension 1 to 4");
      return nsd_minor_hypothesis(n, HessianSymbols{SymmetricGrid(n, entries)});
    } catch (const Error& e) {
      fail_at(dim_tok, e.what());
    }
  }

  // poly := term (("+"|"-") term)*
  Polynomial polynomial() {
    Polynomial acc = term();
    while (punct("+") || punct("-")) {
      const bool minus = next().text == "-";
      Polynomial rhs = term();
      if (minus) {
        acc -= rhs;
      } else {
        acc += rhs;
      }
    }
    return acc;
  }

  // term := factor (("*"|"/") factor)*
  Polynomial term() {
    Polynomial acc = signed_factor();
    while (punct("*") || punct("/")) {
      const Token op = next();
      const Token& at = peek();
      Polynomial rhs = signed_factor();
      if (op.text == "*") {
        acc *= rhs;
      } else {
        if (!rhs.is_constant()) fail_at(at, "division by a non-constant expression is not polynomial");
        if (rhs.is_zero()) fail_at(at, "division by zero");
        acc = acc.scaled(1 / rhs.constant_value());
      }
    }
    return acc;
  }

  Polynomial signed_factor() {
    if (punct("-")) {
      next();
      return -signed_factor();
    }
    if (punct("+")) {
      next();
      return signed_factor();
    }
    return power();
  }

  // power := primary ("^" NUMBER)?
  Polynomial power() {
    Polynomial base = primary();
    if (punct("^")) {
      next();
      if (peek().kind != Tok::Number || peek().text.find('.') != std::string::npos) {
        fail("exponent must be a non-negative integer literal");
      }
      const unsigned long e = std::stoul(next().text);
      if (e > 64) fail("exponent too large");
      return base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  Polynomial primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      return parse_rational(t.text);
    }
    if (t.kind == Tok::Ident && !is_keyword(t.text)) {
      next();
      if (punct("(")) fail_at(t, "function application '" + t.text + "(...)' is not supported");
      auto id = vars_.find(t.text);
      if (!id) fail_at(t, "undeclared variable '" + t.text + "'");
      return Polynomial::variable(*id);
    }
    if (punct("(")) {
      next();
      Polynomial p = polynomial();
      expect(")");
      return p;
    }
    if (t.kind == Tok::End) fail("unexpected end of input");
    fail("unexpected '" + t.text + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  VariableTable& vars_;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

TheoremProblem parse_problem(std::string_view text, std::string default_id) {
  VariableTable vars;
  return Parser(text, vars).problem(std::move(default_id));
}

Formula parse_formula(std::string_view text, VariableTable& vars) { return Parser(text, vars).standalone_formula(); }

std::string to_dsl(const TheoremProblem& p) {
  std::ostringstream out;
  out << "problem " << quote(p.id) << "\n";
  if (p.vars.size() > 0) {
    out << "vars";
    for (const auto& n : p.vars.names()) out << " " << n;
    out << "\n";
  }
  if (!p.free_vars.empty()) {
    out << "free";
    for (VarId v : p.free_vars) out << " " << p.vars.name(v);
    out << "\n";
  }
  if (p.vars.suggested_order()) {
    out << "order";
    for (VarId v : *p.vars.suggested_order()) out << " " << p.vars.name(v);
    out << "\n";
  }
  for (const auto& [k, v] : p.metadata) out << "meta " << k << " " << quote(v) << "\n";
  out << "assume " << to_text(p.assumptions, p.vars) << "\n";
  out << "hypothesis " << to_text(p.hypothesis, p.vars) << "\n";
  return out.str();
}

nlohmann::json to_json(const TheoremProblem& p) {
  nlohmann::json doc;
  doc["id"] = p.id;
  doc["vars"] = p.vars.names();
  auto& free = doc["free"] = nlohmann::json::array();
  for (VarId v : p.free_vars) free.push_back(p.vars.name(v));
  if (p.vars.suggested_order()) {
    auto& order = doc["order"] = nlohmann::json::array();
    for (VarId v : *p.vars.suggested_order()) order.push_back(p.vars.name(v));
  }
  doc["assume"] = to_text(p.assumptions, p.vars);
  doc["hypothesis"] = to_text(p.hypothesis, p.vars);
  doc["metadata"] = p.metadata;
  return doc;
}

TheoremProblem problem_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error("problem JSON must be an object");
  if (doc.contains("dsl")) {
    return parse_problem(doc.at("dsl").get<std::string>(), doc.value("id", std::string("problem")));
  }
  for (const char* key : {"vars", "assume", "hypothesis"}) {
    if (!doc.contains(key)) throw Error(std::string("problem JSON lacks field '") + key + "'");
  }
  TheoremProblem p;
  p.id = doc.value("id", std::string("problem"));
  for (const auto& n : doc.at("vars")) p.vars.add(n.get<std::string>());
  p.assumptions = parse_formula(doc.at("assume").get<std::string>(), p.vars);
  p.hypothesis = parse_formula(doc.at("hypothesis").get<std::string>(), p.vars);
  if (doc.contains("free")) {
    for (const auto& n : doc.at("free")) p.free_vars.push_back(p.vars.at(n.get<std::string>()));
  }
  std::sort(p.free_vars.begin(), p.free_vars.end());
  p.free_vars.erase(std::unique(p.free_vars.begin(), p.free_vars.end()), p.free_vars.end());
  if (doc.contains("order")) {
    std::vector<VarId> order;
    for (const auto& n : doc.at("order")) order.push_back(p.vars.at(n.get<std::string>()));
    p.vars.set_suggested_order(std::move(order));
  }
  if (doc.contains("metadata")) p.metadata = doc.at("metadata").get<std::map<std::string, std::string>>();
  return p;
}

}  // namespace econqe
