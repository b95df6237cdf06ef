#include "econqe/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "econqe/error.hpp"

namespace econqe {

namespace {

std::size_t hash_mpz(const mpz_class& z) noexcept {
  std::size_t h = static_cast<std::size_t>(mpz_sgn(z.get_mpz_t()) + 1);
  const std::size_t limbs = mpz_size(z.get_mpz_t());
  for (std::size_t i = 0; i < limbs; ++i) {
    h = h * 1099511628211ULL ^ static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), i));
  }
  return h;
}

inline void hash_combine(std::size_t& seed, std::size_t value) noexcept {
  seed ^= value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw Error("empty numeric literal");
  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    pos = 1;
  }
  Rational value;
  const auto slash = s.find('/', pos);
  auto all_digits = [](const std::string& t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  if (slash != std::string::npos) {
    const std::string num = s.substr(pos, slash - pos);
    const std::string den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw Error("malformed rational '" + text + "'");
    Integer d(den, 10);
    if (d == 0) throw Error("zero denominator in '" + text + "'");
    value = Rational(Integer(num, 10), d);
    value.canonicalize();
  } else {
    std::string mantissa = s.substr(pos);
    long exponent = 0;
    const auto e = mantissa.find_first_of("eE");
    if (e != std::string::npos) {
      const std::string exp_text = mantissa.substr(e + 1);
      std::size_t used = 0;
      try {
        exponent = std::stol(exp_text, &used);
      } catch (const std::exception&) {
        throw Error("malformed exponent in '" + text + "'");
      }
      if (used != exp_text.size()) throw Error("malformed exponent in '" + text + "'");
      mantissa = mantissa.substr(0, e);
    }
    std::string digits;
    const auto dot = mantissa.find('.');
    if (dot == std::string::npos) {
      digits = mantissa;
    } else {
      digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
      exponent -= static_cast<long>(mantissa.size() - dot - 1);
      if (dot == 0 && digits.empty()) throw Error("malformed decimal '" + text + "'");
    }
    if (!all_digits(digits)) throw Error("malformed number '" + text + "'");
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    if (exponent >= 0) {
      value = Rational(Integer(digits, 10) * scale);
    } else {
      value = Rational(Integer(digits, 10), scale);
      value.canonicalize();
    }
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) { return value.get_str(); }

std::size_t hash_value(const Rational& value) {
  std::size_t h = hash_mpz(value.get_num());
  hash_combine(h, hash_mpz(value.get_den()));
  return h;
}

// ---------------------------------------------------------------- Monomial

Monomial Monomial::variable(VarId var, unsigned exponent) {
  Monomial m;
  if (exponent > 0) {
    m.factors_.emplace_back(var, exponent);
    m.total_ = exponent;
  }
  return m;
}

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end());
  Monomial m;
  for (const auto& [var, exp] : factors) {
    if (exp == 0) continue;
    if (!m.factors_.empty() && m.factors_.back().first == var) {
      m.factors_.back().second += exp;
    } else {
      m.factors_.emplace_back(var, exp);
    }
    m.total_ += exp;
  }
  return m;
}

unsigned Monomial::degree_in(VarId var) const noexcept {
  for (const auto& [v, e] : factors_) {
    if (v == var) return e;
    if (v > var) break;
  }
  return 0;
}

Monomial Monomial::without(VarId var) const {
  Monomial m;
  for (const auto& f : factors_) {
    if (f.first == var) continue;
    m.factors_.push_back(f);
    m.total_ += f.second;
  }
  return m;
}

Monomial operator*(const Monomial& lhs, const Monomial& rhs) {
  Monomial m;
  m.factors_.reserve(lhs.factors_.size() + rhs.factors_.size());
  auto a = lhs.factors_.begin();
  auto b = rhs.factors_.begin();
  while (a != lhs.factors_.end() || b != rhs.factors_.end()) {
    if (b == rhs.factors_.end() || (a != lhs.factors_.end() && a->first < b->first)) {
      m.factors_.push_back(*a++);
    } else if (a == lhs.factors_.end() || b->first < a->first) {
      m.factors_.push_back(*b++);
    } else {
      m.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  m.total_ = lhs.total_ + rhs.total_;
  return m;
}

std::strong_ordering operator<=>(const Monomial& lhs, const Monomial& rhs) {
  if (auto c = lhs.total_ <=> rhs.total_; c != 0) return c;
  auto a = lhs.factors_.begin();
  auto b = rhs.factors_.begin();
  while (a != lhs.factors_.end() && b != rhs.factors_.end()) {
    if (a->first != b->first) {
      // The side carrying the lower-indexed variable has the larger exponent there.
      return a->first < b->first ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    if (a->second != b->second) return a->second <=> b->second;
    ++a;
    ++b;
  }
  if (a != lhs.factors_.end()) return std::strong_ordering::greater;
  if (b != rhs.factors_.end()) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

std::size_t Monomial::hash() const noexcept {
  std::size_t h = total_;
  for (const auto& [v, e] : factors_) {
    hash_combine(h, v);
    hash_combine(h, e);
  }
  return h;
}

// -------------------------------------------------------------- Polynomial

Polynomial::Polynomial(const Rational& constant) {
  if (constant != 0) terms_.push_back({Monomial{}, constant});
}

Polynomial Polynomial::variable(VarId var) { return monomial(Monomial::variable(var), 1); }

Polynomial Polynomial::monomial(const Monomial& mono, const Rational& coefficient) {
  Polynomial p;
  if (coefficient != 0) p.terms_.push_back({mono, coefficient});
  return p;
}

Polynomial Polynomial::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.monomial > b.monomial; });
  Polynomial p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().monomial == t.monomial) {
      p.terms_.back().coefficient += t.coefficient;
    } else {
      if (!p.terms_.empty() && p.terms_.back().coefficient == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().coefficient == 0) p.terms_.pop_back();
  return p;
}

bool Polynomial::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].monomial.is_one());
}

Rational Polynomial::constant_value() const {
  if (!is_constant()) throw Error("polynomial is not constant");
  return constant_term();
}

Rational Polynomial::constant_term() const {
  if (!terms_.empty() && terms_.back().monomial.is_one()) return terms_.back().coefficient;
  return 0;
}

unsigned Polynomial::total_degree() const noexcept {
  return terms_.empty() ? 0 : terms_.front().monomial.total_degree();
}

unsigned Polynomial::degree_in(VarId var) const noexcept {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.monomial.degree_in(var));
  return d;
}

std::vector<VarId> Polynomial::variables() const {
  std::vector<VarId> vars;
  for (const auto& t : terms_) {
    for (const auto& f : t.monomial.factors()) vars.push_back(f.first);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

Rational Polynomial::leading_coefficient() const {
  return terms_.empty() ? Rational(0) : terms_.front().coefficient;
}

Rational Polynomial::content() const {
  if (terms_.empty()) return 0;
  Integer num_gcd = 0;
  Integer den_lcm = 1;
  for (const auto& t : terms_) {
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), t.coefficient.get_num_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.coefficient.get_den_mpz_t());
  }
  Rational c(num_gcd, den_lcm);
  c.canonicalize();
  return c;
}

std::vector<Polynomial> Polynomial::coefficients_in(VarId var) const {
  std::vector<std::vector<Term>> buckets(degree_in(var) + 1);
  for (const auto& t : terms_) {
    buckets[t.monomial.degree_in(var)].push_back({t.monomial.without(var), t.coefficient});
  }
  std::vector<Polynomial> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(from_terms(std::move(b)));
  return out;
}

Polynomial Polynomial::derivative(VarId var) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    const unsigned d = t.monomial.degree_in(var);
    if (d == 0) continue;
    std::vector<Monomial::Factor> factors(t.monomial.factors().begin(), t.monomial.factors().end());
    for (auto& f : factors) {
      if (f.first == var) f.second -= 1;
    }
    out.push_back({Monomial::from_factors(std::move(factors)), t.coefficient * d});
  }
  return from_terms(std::move(out));
}

Polynomial Polynomial::substitute(VarId var, const Polynomial& value) const {
  const auto coeffs = coefficients_in(var);
  // Horner evaluation in `value`.
  Polynomial result;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    result = result * value + *it;
  }
  return result;
}

Polynomial Polynomial::partial_evaluate(const Point& point) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Rational c = t.coefficient;
    std::vector<Monomial::Factor> rest;
    for (const auto& [v, e] : t.monomial.factors()) {
      auto it = point.find(v);
      if (it == point.end()) {
        rest.emplace_back(v, e);
      } else {
        Rational power;
        mpz_pow_ui(power.get_num_mpz_t(), it->second.get_num_mpz_t(), e);
        mpz_pow_ui(power.get_den_mpz_t(), it->second.get_den_mpz_t(), e);
        c *= power;
      }
    }
    if (c != 0) out.push_back({Monomial::from_factors(std::move(rest)), std::move(c)});
  }
  return from_terms(std::move(out));
}

Rational Polynomial::evaluate(const Point& point) const {
  Rational sum = 0;
  for (const auto& t : terms_) {
    Rational c = t.coefficient;
    for (const auto& [v, e] : t.monomial.factors()) {
      auto it = point.find(v);
      if (it == point.end()) throw Error("no value assigned to variable #" + std::to_string(v));
      Rational power;
      mpz_pow_ui(power.get_num_mpz_t(), it->second.get_num_mpz_t(), e);
      mpz_pow_ui(power.get_den_mpz_t(), it->second.get_den_mpz_t(), e);
      c *= power;
    }
    sum += c;
  }
  return sum;
}

Polynomial Polynomial::pow(unsigned exponent) const {
  Polynomial result(1);
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1U) result *= base;
    exponent >>= 1U;
    if (exponent > 0) base *= base;
  }
  return result;
}

Polynomial Polynomial::operator-() const {
  Polynomial p = *this;
  for (auto& t : p.terms_) t.coefficient = -t.coefficient;
  return p;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  std::vector<Term> merged;
  merged.reserve(terms_.size() + rhs.terms_.size());
  auto a = terms_.begin();
  auto b = rhs.terms_.begin();
  while (a != terms_.end() || b != rhs.terms_.end()) {
    if (b == rhs.terms_.end() || (a != terms_.end() && a->monomial > b->monomial)) {
      merged.push_back(std::move(*a++));
    } else if (a == terms_.end() || b->monomial > a->monomial) {
      merged.push_back(*b++);
    } else {
      Rational c = a->coefficient + b->coefficient;
      if (c != 0) merged.push_back({std::move(a->monomial), std::move(c)});
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) { return *this += -rhs; }

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
  *this = *this * rhs;
  return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  if (lhs.is_zero() || rhs.is_zero()) return {};
  if (rhs.terms_.size() == 1 && rhs.terms_[0].monomial.is_one()) return lhs.scaled(rhs.terms_[0].coefficient);
  if (lhs.terms_.size() == 1 && lhs.terms_[0].monomial.is_one()) return rhs.scaled(lhs.terms_[0].coefficient);
  std::map<Monomial, Rational, std::greater<>> acc;
  for (const auto& a : lhs.terms_) {
    for (const auto& b : rhs.terms_) {
      acc[a.monomial * b.monomial] += a.coefficient * b.coefficient;
    }
  }
  Polynomial p;
  p.terms_.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (c != 0) p.terms_.push_back({m, std::move(c)});
  }
  return p;
}

Polynomial Polynomial::scaled(const Rational& factor) const {
  if (factor == 0) return {};
  Polynomial p = *this;
  for (auto& t : p.terms_) t.coefficient *= factor;
  return p;
}

std::strong_ordering operator<=>(const Polynomial& lhs, const Polynomial& rhs) {
  const std::size_t n = std::min(lhs.terms_.size(), rhs.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = lhs.terms_[i];
    const auto& b = rhs.terms_[i];
    if (auto c = a.monomial <=> b.monomial; c != 0) return c;
    const int cmp = ::cmp(a.coefficient, b.coefficient);
    if (cmp != 0) return cmp < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return lhs.terms_.size() <=> rhs.terms_.size();
}

std::size_t Polynomial::hash() const noexcept {
  std::size_t h = terms_.size();
  for (const auto& t : terms_) {
    hash_combine(h, t.monomial.hash());
    hash_combine(h, hash_value(t.coefficient));
  }
  return h;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    Rational c = t.coefficient;
    const bool negative = c < 0;
    if (negative) c = -c;
    if (first) {
      if (negative) out << "-";
    } else {
      out << (negative ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (c != 1 || t.monomial.is_one()) {
      out << c.get_str();
      wrote = true;
    }
    for (const auto& [v, e] : t.monomial.factors()) {
      if (wrote) out << "*";
      out << (v < names.size() ? names[v] : "x" + std::to_string(v));
      if (e > 1) out << "^" << e;
      wrote = true;
    }
  }
  return out.str();
}

}  // namespace econqe
