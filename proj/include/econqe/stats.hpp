#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "econqe/formula.hpp"

namespace econqe {

/// Variable-by-polynomial incidence of a formula's DNF.
struct OccurrenceMatrix {
  std::vector<VarId> rows;          // occurring variables, ascending
  std::vector<Polynomial> columns;  // distinct canonical polynomials, sorted
  std::vector<std::vector<bool>> bits;

  std::size_t ones() const;
  /// ones / (rows · columns); 0 for an empty matrix.
  Rational density() const;
};

/// Throws ClauseCapExceeded like to_dnf.
OccurrenceMatrix occurrence_matrix(const Formula& f, std::size_t clause_cap = kDefaultClauseCap);

/// Structural metrics of one counterexample query, computed on its DNF.
struct ProblemStats {
  std::string id;
  std::size_t clauses = 0;
  /// Distinct canonical atoms across all clauses.
  std::size_t atoms = 0;
  /// Atom occurrences summed over clauses.
  std::size_t literals = 0;
  std::size_t polynomials = 0;
  std::size_t variables = 0;
  unsigned max_total_degree = 0;
  Rational mean_total_degree = 0;
  /// Highest degree of any single variable in any polynomial.
  unsigned max_variable_degree = 0;
  /// Mean over polynomials of the polynomial's highest single-variable degree.
  Rational mean_polynomial_variable_degree = 0;
  Rational polynomials_per_variable = 0;
  Rational density = 0;
};

ProblemStats analyze_problem(const std::string& id, const Formula& matrix,
                             std::size_t clause_cap = kDefaultClauseCap);

struct MetricSummary {
  Rational min, max, mean, median;
};

struct StatsReport {
  std::vector<ProblemStats> rows;  // sorted by id
  /// Keyed by metric name (see stats_metric_names).
  std::map<std::string, MetricSummary> aggregates;
};

/// Column names of the CSV, in order, after "id".
const std::vector<std::string>& stats_metric_names();
Rational metric_value(const ProblemStats& row, const std::string& metric);

/// Min, max, exact mean and lower-middle median of every metric.
/// Throws econqe::Error on an empty input.
StatsReport aggregate(std::vector<ProblemStats> rows);

/// Decimal rendering with `places` digits, rounding halves away from zero.
std::string format_decimal(const Rational& value, int places);

/// Header line plus one line per row; rationals to 4 decimals.
std::string to_csv(const StatsReport& report);
/// {rows: [...], aggregates: {metric: {min, max, mean, median, mean_exact}}}.
/// Means are rounded to 1 decimal (density to 2), as in the published figures.
nlohmann::json to_json(const StatsReport& report);

}  // namespace econqe
