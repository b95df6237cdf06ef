#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "econqe/formula.hpp"
#include "econqe/problem.hpp"

namespace econqe {

/// Symmetric grid of variables indexed by unordered pairs (i, j), 0 ≤ i ≤ j < n.
class SymmetricGrid {
 public:
  SymmetricGrid() = default;
  /// `upper` lists the grid row-major over i ≤ j: (0,0), (0,1), ..., (n-1,n-1).
  SymmetricGrid(std::size_t n, const std::vector<VarId>& upper);

  std::size_t dimension() const noexcept { return n_; }
  VarId at(std::size_t i, std::size_t j) const;
  std::size_t variable_count() const noexcept { return cells_.size(); }
  /// Symbolic matrix whose entries are the grid variables.
  std::vector<std::vector<Polynomial>> matrix() const;

 private:
  std::size_t n_ = 0;
  std::map<std::pair<std::size_t, std::size_t>, VarId> cells_;
};

/// Dot products among k abstract vectors: cell (i, j) holds v_i · v_j.
struct DotProductMap {
  std::vector<std::string> vectors;
  SymmetricGrid grid;

  /// Uses (and declares when missing) variables named "a.b" for vectors a, b.
  static DotProductMap declare(const std::vector<std::string>& vectors, VariableTable& vars);
};

/// Symbolic Hessian entries f_ij of an n-variable function.
struct HessianSymbols {
  SymmetricGrid grid;
};

/// Existential queries for compatibility, example and counterexample checks.
struct QueryTrio {
  ExistsFormula assumptions;
  ExistsFormula example;
  ExistsFormula counterexample;
};

/// Matrices A, A ∧ H and A ∧ nnf(¬H), each quantified over all non-free
/// variables of the problem.
QueryTrio build_query_trio(const TheoremProblem& problem);

/// Determinant by cofactor expansion along the first row.
Polynomial determinant(const std::vector<std::vector<Polynomial>>& m);

/// det(G[S,S]) ≥ 0 for every non-empty S ⊆ {1..k}: 2^k − 1 atoms.
/// Throws econqe::Error unless 1 ≤ k ≤ 6 and the map covers k vectors.
Formula gram_psd_constraints(std::size_t k, const DotProductMap& dp);

/// (−1)^|S| det(M[S,S]) ≥ 0 for every non-empty S ⊆ {1..n}: 2^n − 1 atoms.
/// Throws econqe::Error unless 1 ≤ n ≤ 4.
Formula nsd_minor_hypothesis(std::size_t n, const HessianSymbols& hs);

}  // namespace econqe
