#include "econqe/smt2.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <variant>

#include "econqe/error.hpp"

namespace econqe {

namespace {

// ------------------------------------------------------------ s-expressions

struct Sexp {
  enum class Kind { List, Symbol, Numeral, Decimal, String, Keyword, Other };
  Kind kind = Kind::List;
  std::string text;
  std::vector<Sexp> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_list() const { return kind == Kind::List; }
  bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && text == s; }
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line, column); }
};

bool symbol_char(unsigned char c) {
  return std::isalnum(c) || std::string_view("~!@$%^&*_-+=<>.?/").find(static_cast<char>(c)) != std::string_view::npos;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    for (;;) {
      skip();
      if (pos_ >= text_.size()) return out;
      out.push_back(read());
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  Sexp read() {
    Sexp node;
    node.line = line_;
    node.column = col_;
    const char c = text_[pos_];
    if (c == '(') {
      advance();
      for (;;) {
        skip();
        if (pos_ >= text_.size()) node.fail("unbalanced parenthesis");
        if (text_[pos_] == ')') {
          advance();
          return node;
        }
        node.items.push_back(read());
      }
    }
    if (c == ')') node.fail("unexpected ')'");
    if (c == '|') {
      advance();
      node.kind = Sexp::Kind::Symbol;
      while (pos_ < text_.size() && text_[pos_] != '|') {
        node.text += text_[pos_];
        advance();
      }
      if (pos_ >= text_.size()) node.fail("unterminated quoted symbol");
      advance();
      return node;
    }
    if (c == '"') {
      advance();
      node.kind = Sexp::Kind::String;
      for (;;) {
        if (pos_ >= text_.size()) node.fail("unterminated string literal");
        if (text_[pos_] == '"') {
          advance();
          if (pos_ < text_.size() && text_[pos_] == '"') {
            node.text += '"';
            advance();
            continue;
          }
          return node;
        }
        node.text += text_[pos_];
        advance();
      }
    }
    const bool keyword = c == ':';
    if (keyword) advance();
    while (pos_ < text_.size() && symbol_char(static_cast<unsigned char>(text_[pos_]))) {
      node.text += text_[pos_];
      advance();
    }
    if (node.text.empty()) node.fail(std::string("unexpected character '") + c + "'");
    if (keyword) {
      node.kind = Sexp::Kind::Keyword;
    } else if (std::isdigit(static_cast<unsigned char>(node.text[0]))) {
      const auto dot = node.text.find('.');
      auto digits = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); });
      };
      if (digits(node.text)) {
        node.kind = Sexp::Kind::Numeral;
      } else if (dot != std::string::npos && digits(std::string_view(node.text).substr(0, dot)) &&
                 digits(std::string_view(node.text).substr(dot + 1))) {
        node.kind = Sexp::Kind::Decimal;
      } else {
        node.kind = Sexp::Kind::Other;
      }
    } else {
      node.kind = Sexp::Kind::Symbol;
    }
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// ------------------------------------------------------------------- terms

using Value = std::variant<Polynomial, Formula>;

const std::set<std::string, std::less<>> kReserved = {
    "par", "NUMERAL", "DECIMAL", "STRING", "_", "!", "as", "let", "exists", "forall", "match",
    "assert", "check-sat", "declare-const", "declare-fun", "define-fun", "exit", "get-model", "set-info",
    "set-logic", "set-option", "true", "false", "and", "or", "not", "distinct", "ite"};

class TermBuilder {
 public:
  explicit TermBuilder(VariableTable& vars) : vars_(vars) {}

  void define(const std::string& name, Value value) { definitions_[name] = std::move(value); }

  Formula formula(const Sexp& s) {
    Value v = term(s);
    if (auto* f = std::get_if<Formula>(&v)) return *f;
    s.fail("expected a Boolean term");
  }

  Polynomial polynomial(const Sexp& s) {
    Value v = term(s);
    if (auto* p = std::get_if<Polynomial>(&v)) return *p;
    s.fail("expected an arithmetic term");
  }

  Value term(const Sexp& s) {
    switch (s.kind) {
      case Sexp::Kind::Numeral:
      case Sexp::Kind::Decimal: return Polynomial(parse_rational(s.text));
      case Sexp::Kind::Symbol: return symbol(s);
      case Sexp::Kind::List: return application(s);
      default: s.fail("unsupported token '" + s.text + "'");
    }
  }

 private:
  Value symbol(const Sexp& s) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (auto found = it->find(s.text); found != it->end()) return found->second;
    }
    if (s.text == "true") return Formula::truth();
    if (s.text == "false") return Formula::falsity();
    if (auto found = definitions_.find(s.text); found != definitions_.end()) return found->second;
    if (auto id = vars_.find(s.text)) return Polynomial::variable(*id);
    s.fail("undeclared symbol '" + s.text + "'");
  }

  Value application(const Sexp& s) {
    if (s.items.empty()) s.fail("empty application");
    const Sexp& head = s.items[0];
    if (head.kind != Sexp::Kind::Symbol) head.fail("unsupported application head");
    const std::string& op = head.text;
    const std::size_t argc = s.items.size() - 1;
    auto arg = [&](std::size_t i) -> const Sexp& { return s.items[i + 1]; };
    auto need = [&](std::size_t min) {
      if (argc < min) s.fail("'" + op + "' needs at least " + std::to_string(min) + " argument(s)");
    };

    if (op == "let") {
      if (argc != 2 || !arg(0).is_list()) s.fail("malformed let");
      std::map<std::string, Value> scope;
      for (const auto& binding : arg(0).items) {
        if (!binding.is_list() || binding.items.size() != 2 || binding.items[0].kind != Sexp::Kind::Symbol) {
          binding.fail("malformed let binding");
        }
        scope.insert_or_assign(binding.items[0].text, term(binding.items[1]));
      }
      scopes_.push_back(std::move(scope));
      Value body = term(arg(1));
      scopes_.pop_back();
      return body;
    }
    if (op == "and" || op == "or") {
      std::vector<Formula> kids;
      for (std::size_t i = 0; i < argc; ++i) kids.push_back(formula(arg(i)));
      return op == "and" ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
    if (op == "not") {
      if (argc != 1) s.fail("'not' takes one argument");
      return Formula::negation(formula(arg(0)));
    }
    if (op == "=>") {
      need(2);
      Formula result = formula(arg(argc - 1));
      for (std::size_t i = argc - 1; i-- > 0;) result = Formula::implies(formula(arg(i)), result);
      return result;
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=" || op == "=" || op == "distinct") {
      need(2);
      std::vector<Value> args;
      for (std::size_t i = 0; i < argc; ++i) args.push_back(term(arg(i)));
      const bool boolean = std::holds_alternative<Formula>(args[0]);
      for (std::size_t i = 0; i < argc; ++i) {
        if (std::holds_alternative<Formula>(args[i]) != boolean) arg(i).fail("mixed Boolean and arithmetic arguments");
      }
      if (boolean) {
        if (op != "=" && op != "distinct") s.fail("'" + op + "' on Boolean arguments");
        return boolean_equality(args, op == "distinct");
      }
      std::vector<Polynomial> ps;
      for (auto& a : args) ps.push_back(std::get<Polynomial>(a));
      if (op == "distinct") {
        std::vector<Formula> parts;
        for (std::size_t i = 0; i < ps.size(); ++i) {
          for (std::size_t j = i + 1; j < ps.size(); ++j) parts.push_back(Formula::atom(ps[i] - ps[j], Rel::Ne));
        }
        return Formula::conj(std::move(parts));
      }
      const Rel rel = op == "<" ? Rel::Lt : op == "<=" ? Rel::Le : op == ">" ? Rel::Gt : op == ">=" ? Rel::Ge : Rel::Eq;
      std::vector<Formula> chain;
      for (std::size_t i = 0; i + 1 < ps.size(); ++i) chain.push_back(Formula::atom(ps[i] - ps[i + 1], rel));
      return chain.size() == 1 ? chain[0] : Formula::conj(std::move(chain));
    }
    if (op == "+" || op == "*") {
      need(1);
      Polynomial acc = polynomial(arg(0));
      for (std::size_t i = 1; i < argc; ++i) {
        if (op == "+") {
          acc += polynomial(arg(i));
        } else {
          acc *= polynomial(arg(i));
        }
      }
      return acc;
    }
    if (op == "-") {
      need(1);
      Polynomial acc = polynomial(arg(0));
      if (argc == 1) return -acc;
      for (std::size_t i = 1; i < argc; ++i) acc -= polynomial(arg(i));
      return acc;
    }
    if (op == "/") {
      need(2);
      Polynomial acc = polynomial(arg(0));
      for (std::size_t i = 1; i < argc; ++i) {
        const Polynomial d = polynomial(arg(i));
        if (!d.is_constant() || d.is_zero()) arg(i).fail("division by a non-numeral or by zero");
        acc = acc.scaled(1 / d.constant_value());
      }
      return acc;
    }
    if (op == "to_real") {
      if (argc != 1) s.fail("'to_real' takes one argument");
      return polynomial(arg(0));
    }
    head.fail("unsupported operator '" + op + "'");
  }

  Formula boolean_equality(const std::vector<Value>& args, bool distinct) {
    std::vector<Formula> fs;
    for (const auto& a : args) fs.push_back(std::get<Formula>(a));
    auto iff = [](const Formula& a, const Formula& b) {
      return Formula::disj({Formula::conj({a, b}), Formula::conj({Formula::negation(a), Formula::negation(b)})});
    };
    std::vector<Formula> parts;
    if (distinct) {
      for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i + 1; j < fs.size(); ++j) parts.push_back(Formula::negation(iff(fs[i], fs[j])));
      }
    } else {
      for (std::size_t i = 0; i + 1 < fs.size(); ++i) parts.push_back(iff(fs[i], fs[i + 1]));
    }
    return Formula::conj(std::move(parts));
  }

  VariableTable& vars_;
  std::map<std::string, Value> definitions_;
  std::vector<std::map<std::string, Value>> scopes_;
};

// ---------------------------------------------------------------- emission

std::string smt2_rational(const Rational& q) {
  const Rational a = abs(q);
  std::string body = a.get_den() == 1 ? a.get_num().get_str() : "(/ " + a.get_num().get_str() + " " + a.get_den().get_str() + ")";
  return q < 0 ? "(- " + body + ")" : body;
}

std::string smt2_polynomial(const Polynomial& p, const std::vector<std::string>& symbols) {
  if (p.is_zero()) return "0";
  std::vector<std::string> terms;
  for (const auto& t : p.terms()) {
    std::vector<std::string> factors;
    for (const auto& [var, exp] : t.monomial.factors()) {
      for (unsigned k = 0; k < exp; ++k) factors.push_back(symbols.at(var));
    }
    if (factors.empty()) {
      terms.push_back(smt2_rational(t.coefficient));
      continue;
    }
    std::string product = factors.size() == 1 ? factors[0] : "(*";
    if (factors.size() > 1) {
      for (const auto& f : factors) product += " " + f;
      product += ")";
    }
    if (t.coefficient == 1) {
      terms.push_back(product);
    } else if (t.coefficient == -1) {
      terms.push_back("(- " + product + ")");
    } else {
      terms.push_back("(* " + smt2_rational(t.coefficient) + " " + product + ")");
    }
  }
  if (terms.size() == 1) return terms[0];
  std::string out = "(+";
  for (const auto& t : terms) out += " " + t;
  return out + ")";
}

void smt2_formula(const Formula& f, const std::vector<std::string>& symbols, std::ostream& out) {
  switch (f.kind()) {
    case Formula::Kind::True: out << "true"; return;
    case Formula::Kind::False: out << "false"; return;
    case Formula::Kind::Atom: {
      const Atom& a = f.as_atom();
      const std::string lhs = smt2_polynomial(a.lhs, symbols);
      if (a.rel == Rel::Ne) {
        out << "(distinct " << lhs << " 0)";
      } else {
        out << "(" << symbol(a.rel) << " " << lhs << " 0)";
      }
      return;
    }
    case Formula::Kind::Not:
      out << "(not ";
      smt2_formula(f.children()[0], symbols, out);
      out << ")";
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      out << (f.kind() == Formula::Kind::And ? "(and" : "(or");
      for (const auto& c : f.children()) {
        out << "\n  ";
        smt2_formula(c, symbols, out);
      }
      out << ")";
      return;
  }
}

std::vector<std::string> smt2_symbols(const VariableTable& vars) {
  std::vector<std::string> out;
  for (const auto& n : vars.names()) out.push_back(smt2_symbol(n));
  return out;
}

// ------------------------------------------------------------------ models

std::optional<Rational> model_value(const Sexp& s, bool& algebraic) {
  switch (s.kind) {
    case Sexp::Kind::Numeral:
    case Sexp::Kind::Decimal: return parse_rational(s.text);
    case Sexp::Kind::Other:
      if (!s.text.empty() && s.text.back() == '?') algebraic = true;
      return std::nullopt;
    case Sexp::Kind::List: {
      if (s.items.empty() || s.items[0].kind != Sexp::Kind::Symbol) return std::nullopt;
      const std::string& op = s.items[0].text;
      if (op == "root-obj" || op == "_") {
        algebraic = true;
        return std::nullopt;
      }
      if (op == "-" && s.items.size() == 2) {
        auto v = model_value(s.items[1], algebraic);
        if (v) return Rational(-*v);
        return std::nullopt;
      }
      if (op == "/" && s.items.size() == 3) {
        auto a = model_value(s.items[1], algebraic);
        auto b = model_value(s.items[2], algebraic);
        if (!a || !b || *b == 0) return std::nullopt;
        return Rational(*a / *b);
      }
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

void collect_model(const Sexp& s, const VariableTable& vars, Smt2Model& model) {
  if (!s.is_list()) return;
  if (!s.items.empty() && s.items[0].is_symbol("define-fun")) {
    if (s.items.size() != 5 || s.items[1].kind != Sexp::Kind::Symbol) s.fail("malformed define-fun in model");
    const auto id = vars.find(s.items[1].text);
    if (!id) return;
    bool algebraic = false;
    auto value = model_value(s.items[4], algebraic);
    if (value) {
      model.point[*id] = *value;
    } else if (algebraic) {
      model.algebraic = true;
    } else {
      s.items[4].fail("unsupported model value for '" + s.items[1].text + "'");
    }
    return;
  }
  for (const auto& item : s.items) collect_model(item, vars, model);
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (unsigned char c : name) out += std::isalnum(c) ? static_cast<char>(c) : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "v_" + out;
  return out;
}

/// Identifiers safe for Redlog and Maple, kept unique by suffixing.
std::vector<std::string> cas_names(const VariableTable& vars) {
  std::vector<std::string> out;
  std::set<std::string> used;
  for (const auto& n : vars.names()) {
    std::string s = sanitize(n);
    for (int k = 2; used.count(s); ++k) s = sanitize(n) + "_" + std::to_string(k);
    used.insert(s);
    out.push_back(s);
  }
  return out;
}

void cas_formula(const Formula& f, const std::vector<std::string>& names, std::ostream& out) {
  switch (f.kind()) {
    case Formula::Kind::True: out << "true"; return;
    case Formula::Kind::False: out << "false"; return;
    case Formula::Kind::Atom: {
      const Atom& a = f.as_atom();
      out << a.lhs.to_string(names) << " " << (a.rel == Rel::Ne ? "<>" : symbol(a.rel)) << " 0";
      return;
    }
    case Formula::Kind::Not:
      out << "not (";
      cas_formula(f.children()[0], names, out);
      out << ")";
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      bool first = true;
      out << "(";
      for (const auto& c : f.children()) {
        if (!first) out << (f.kind() == Formula::Kind::And ? " and " : " or ");
        first = false;
        cas_formula(c, names, out);
      }
      out << ")";
      return;
    }
  }
}

}  // namespace

std::string smt2_symbol(const std::string& name) {
  const bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0])) &&
                      std::all_of(name.begin(), name.end(), [](unsigned char c) { return symbol_char(c); }) &&
                      !kReserved.count(name);
  return simple ? name : "|" + name + "|";
}

std::string emit_smt2(const ExistsFormula& query, const Smt2EmitOptions& options) {
  const auto symbols = smt2_symbols(query.vars);
  std::ostringstream out;
  out << "(set-logic " << options.logic << ")\n";
  if (const auto& order = query.vars.suggested_order()) {
    out << "(set-info :variable-order \"";
    for (std::size_t i = 0; i < order->size(); ++i) out << (i ? " " : "") << query.vars.name((*order)[i]);
    out << "\")\n";
  }
  for (const auto& s : symbols) out << "(declare-fun " << s << " () Real)\n";
  out << "(assert ";
  smt2_formula(query.matrix, symbols, out);
  out << ")\n(check-sat)\n";
  if (options.get_model) out << "(get-model)\n";
  out << "(exit)\n";
  return out.str();
}

Smt2Script parse_smt2(std::string_view text) { return parse_smt2(text, VariableTable{}); }

Smt2Script parse_smt2(std::string_view text, const VariableTable& base) {
  Smt2Script script;
  script.query.vars = base;
  VariableTable& vars = script.query.vars;
  std::vector<VarId> declared;
  TermBuilder builder(vars);
  std::vector<Formula> asserts;
  std::optional<std::pair<std::string, Sexp>> order_hint;

  for (const auto& cmd : Reader(text).read_all()) {
    if (!cmd.is_list() || cmd.items.empty() || cmd.items[0].kind != Sexp::Kind::Symbol) cmd.fail("expected a command");
    const std::string& name = cmd.items[0].text;
    const auto& args = cmd.items;
    if (name == "set-logic") {
      if (args.size() != 2) cmd.fail("malformed set-logic");
      script.logic = args[1].text;
    } else if (name == "set-info") {
      if (args.size() < 2 || args[1].kind != Sexp::Kind::Keyword) cmd.fail("malformed set-info");
      std::string value = args.size() > 2 ? args[2].text : "";
      if (args[1].text == "variable-order") order_hint.emplace(value, args[1]);
      script.info[args[1].text] = value;
    } else if (name == "set-option" || name == "exit") {
      continue;
    } else if (name == "declare-fun" || name == "declare-const") {
      const bool fun = name == "declare-fun";
      if (args.size() != (fun ? 4U : 3U) || args[1].kind != Sexp::Kind::Symbol) cmd.fail("malformed " + name);
      if (fun && (!args[2].is_list() || !args[2].items.empty())) args[2].fail("functions with arguments are not supported");
      const Sexp& sort = args.back();
      if (!sort.is_symbol("Real")) sort.fail("unsupported sort '" + (sort.is_list() ? std::string("(...)") : sort.text) + "'");
      const VarId id = vars.intern(args[1].text);
      if (std::find(declared.begin(), declared.end(), id) != declared.end()) {
        args[1].fail("duplicate declaration of '" + args[1].text + "'");
      }
      declared.push_back(id);
    } else if (name == "define-fun") {
      if (args.size() != 5 || args[1].kind != Sexp::Kind::Symbol) cmd.fail("malformed define-fun");
      if (!args[2].is_list() || !args[2].items.empty()) args[2].fail("define-fun with parameters is not supported");
      if (!args[3].is_symbol("Real") && !args[3].is_symbol("Bool")) args[3].fail("unsupported sort '" + args[3].text + "'");
      builder.define(args[1].text, builder.term(args[4]));
    } else if (name == "assert") {
      if (args.size() != 2) cmd.fail("malformed assert");
      asserts.push_back(builder.formula(args[1]));
    } else if (name == "check-sat") {
      script.check_sat = true;
    } else if (name == "get-model") {
      script.get_model = true;
    } else {
      cmd.items[0].fail("unsupported command '" + name + "'");
    }
  }

  if (order_hint) {
    std::istringstream in(order_hint->first);
    std::vector<VarId> order;
    std::string n;
    while (in >> n) {
      auto id = vars.find(n);
      if (!id) order_hint->second.fail("variable-order names undeclared '" + n + "'");
      order.push_back(*id);
    }
    if (order.size() == vars.size()) {
      vars.set_suggested_order(std::move(order));
    } else if (base.size() == 0) {
      order_hint->second.fail("variable-order must list every declared constant");
    }
  }
  script.query.matrix = asserts.size() == 1 ? asserts[0] : Formula::conj(std::move(asserts));
  std::sort(declared.begin(), declared.end());
  script.query.bound = std::move(declared);
  return script;
}

Smt2Model parse_smt2_model(std::string_view text, const VariableTable& vars) {
  Smt2Model model;
  for (const auto& s : Reader(text).read_all()) collect_model(s, vars, model);
  return model;
}

std::string emit_redlog(const ExistsFormula& query) {
  const auto names = cas_names(query.vars);
  std::ostringstream out;
  out << "rlset ofsf;\n";
  out << "phi := ";
  std::vector<std::string> bound;
  for (VarId v : query.bound) bound.push_back(names[v]);
  if (!bound.empty()) {
    out << "ex({";
    for (std::size_t i = 0; i < bound.size(); ++i) out << (i ? ", " : "") << bound[i];
    out << "}, ";
  }
  cas_formula(query.matrix, names, out);
  if (!bound.empty()) out << ")";
  out << ";\nrlqe phi;\nend;\n";
  return out.str();
}

std::string emit_maple(const ExistsFormula& query) {
  const auto names = cas_names(query.vars);
  std::ostringstream out;
  out << "with(QuantifierElimination):\n";
  out << "phi := ";
  if (!query.bound.empty()) {
    out << "exists([";
    for (std::size_t i = 0; i < query.bound.size(); ++i) out << (i ? ", " : "") << names[query.bound[i]];
    out << "], ";
  }
  cas_formula(query.matrix, names, out);
  if (!query.bound.empty()) out << ")";
  out << ":\nQuantifierEliminate(phi);\n";
  return out.str();
}

}  // namespace econqe
