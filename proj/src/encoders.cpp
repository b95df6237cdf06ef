#include "econqe/encoders.hpp"

#include <algorithm>

#include "econqe/error.hpp"

namespace econqe {

SymmetricGrid::SymmetricGrid(std::size_t n, const std::vector<VarId>& upper) : n_(n) {
  if (upper.size() != n * (n + 1) / 2) {
    throw Error("symmetric grid of dimension " + std::to_string(n) + " needs " + std::to_string(n * (n + 1) / 2) +
                " variables, got " + std::to_string(upper.size()));
  }
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) cells_[{i, j}] = upper[k++];
  }
}

VarId SymmetricGrid::at(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  auto it = cells_.find({i, j});
  if (it == cells_.end()) throw Error("grid index out of range");
  return it->second;
}

std::vector<std::vector<Polynomial>> SymmetricGrid::matrix() const {
  std::vector<std::vector<Polynomial>> m(n_, std::vector<Polynomial>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) m[i][j] = Polynomial::variable(at(i, j));
  }
  return m;
}

DotProductMap DotProductMap::declare(const std::vector<std::string>& vectors, VariableTable& vars) {
  std::vector<VarId> upper;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i; j < vectors.size(); ++j) upper.push_back(vars.intern(vectors[i] + "." + vectors[j]));
  }
  return DotProductMap{vectors, SymmetricGrid(vectors.size(), upper)};
}

QueryTrio build_query_trio(const TheoremProblem& problem) {
  std::vector<VarId> bound;
  for (VarId v = 0; v < problem.vars.size(); ++v) {
    if (!std::binary_search(problem.free_vars.begin(), problem.free_vars.end(), v)) bound.push_back(v);
  }
  const Formula& a = problem.assumptions;
  auto make = [&](Formula matrix) { return ExistsFormula{problem.vars, bound, std::move(matrix)}; };
  return QueryTrio{
      make(a),
      make(Formula::conj({a, problem.hypothesis})),
      make(Formula::conj({a, to_nnf(Formula::negation(problem.hypothesis))})),
  };
}

Polynomial determinant(const std::vector<std::vector<Polynomial>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  Polynomial det;
  for (std::size_t col = 0; col < n; ++col) {
    if (m[0][col].is_zero()) continue;
    std::vector<std::vector<Polynomial>> minor;
    minor.reserve(n - 1);
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Polynomial> row;
      row.reserve(n - 1);
      for (std::size_t c = 0; c < n; ++c) {
        if (c != col) row.push_back(m[r][c]);
      }
      minor.push_back(std::move(row));
    }
    const Polynomial term = m[0][col] * determinant(minor);
    if (col % 2 == 0) {
      det += term;
    } else {
      det -= term;
    }
  }
  return det;
}

namespace {

Polynomial principal_minor(const std::vector<std::vector<Polynomial>>& m, unsigned subset) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (subset & (1U << i)) idx.push_back(i);
  }
  std::vector<std::vector<Polynomial>> sub(idx.size(), std::vector<Polynomial>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < idx.size(); ++c) sub[r][c] = m[idx[r]][idx[c]];
  }
  return determinant(sub);
}

// Subsets ordered by size, then lexicographically, so the singletons come first.
std::vector<unsigned> subsets_by_size(std::size_t n) {
  std::vector<unsigned> out;
  for (unsigned s = 1; s < (1U << n); ++s) out.push_back(s);
  std::stable_sort(out.begin(), out.end(),
                   [](unsigned a, unsigned b) { return __builtin_popcount(a) < __builtin_popcount(b); });
  return out;
}

}  // namespace

Formula gram_psd_constraints(std::size_t k, const DotProductMap& dp) {
  if (k < 1 || k > 6) throw Error("gram_psd supports 1 to 6 vectors, got " + std::to_string(k));
  if (dp.grid.dimension() != k) throw Error("dot-product map does not cover " + std::to_string(k) + " vectors");
  const auto g = dp.grid.matrix();
  std::vector<Formula> atoms;
  for (unsigned s : subsets_by_size(k)) atoms.push_back(Formula::atom(principal_minor(g, s), Rel::Ge));
  return Formula::conj(std::move(atoms));
}

Formula nsd_minor_hypothesis(std::size_t n, const HessianSymbols& hs) {
  if (n < 1 || n > 4) throw Error("nsd_minors supports dimension 1 to 4, got " + std::to_string(n));
  if (hs.grid.dimension() != n) throw Error("Hessian symbols do not match dimension " + std::to_string(n));
  const auto m = hs.grid.matrix();
  std::vector<Formula> atoms;
  for (unsigned s : subsets_by_size(n)) {
    Polynomial minor = principal_minor(m, s);
    if (__builtin_popcount(s) % 2 == 1) minor = -minor;
    atoms.push_back(Formula::atom(minor, Rel::Ge));
  }
  return Formula::conj(std::move(atoms));
}

}  // namespace econqe
