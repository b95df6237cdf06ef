#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "econqe/formula.hpp"
#include "econqe/problem.hpp"

namespace econqe::fixtures {

inline std::string read_model(const std::string& name) {
  std::ifstream in(std::string(ECONQE_MODELS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline TheoremProblem load_model(const std::string& name) { return parse_problem(read_model(name), name); }

/// n/d in lowest terms (gmpxx leaves Rational(n, d) uncanonicalized).
inline Rational ratio(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

/// Small random rationals: integers in [-4, 4] and a few halves and thirds.
inline Rational small_rational(std::mt19937_64& rng) {
  static const std::vector<Rational> values = {-4, -3, -2, -1, 0, 1, 2, 3, 4, Rational(1, 2), Rational(-1, 2),
                                               Rational(1, 3), Rational(-2, 3), Rational(5, 2)};
  return values[rng() % values.size()];
}

inline Polynomial random_polynomial(std::mt19937_64& rng, unsigned vars, unsigned max_degree, unsigned max_terms = 4) {
  Polynomial p;
  const unsigned terms = 1 + rng() % max_terms;
  for (unsigned t = 0; t < terms; ++t) {
    const unsigned degree = rng() % (max_degree + 1);
    Polynomial mono = small_rational(rng);
    for (unsigned d = 0; d < degree; ++d) mono *= Polynomial::variable(static_cast<VarId>(rng() % vars));
    p += mono;
  }
  return p;
}

inline Formula random_formula(std::mt19937_64& rng, unsigned vars, unsigned max_degree, unsigned depth) {
  const unsigned pick = rng() % (depth == 0 ? 1 : 5);
  if (pick == 0) {
    return Formula::atom(random_polynomial(rng, vars, max_degree), static_cast<Rel>(rng() % 6));
  }
  if (pick == 1) return Formula::negation(random_formula(rng, vars, max_degree, depth - 1));
  std::vector<Formula> kids;
  const unsigned n = 2 + rng() % 2;
  for (unsigned i = 0; i < n; ++i) kids.push_back(random_formula(rng, vars, max_degree, depth - 1));
  if (pick == 4) return Formula::implies(kids[0], kids[1]);
  return pick == 2 ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
}

inline Point random_point(std::mt19937_64& rng, unsigned vars) {
  Point p;
  for (VarId v = 0; v < vars; ++v) p[v] = small_rational(rng);
  return p;
}

}  // namespace econqe::fixtures
