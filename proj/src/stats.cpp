#include "econqe/stats.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "econqe/error.hpp"

namespace econqe {

namespace {

std::set<Polynomial> distinct_polynomials(const std::vector<Clause>& clauses) {
  std::set<Polynomial> out;
  for (const auto& clause : clauses) {
    for (const auto& a : clause) out.insert(a.lhs);
  }
  return out;
}

unsigned max_variable_degree(const Polynomial& p) {
  unsigned d = 0;
  for (VarId v : p.variables()) d = std::max(d, p.degree_in(v));
  return d;
}

Rational ratio(std::size_t n, std::size_t d) {
  if (d == 0) return 0;
  Rational q(static_cast<long>(n), static_cast<long>(d));
  q.canonicalize();
  return q;
}

int places_for(const std::string& metric) { return metric == "density" ? 2 : 1; }

}  // namespace

std::size_t OccurrenceMatrix::ones() const {
  std::size_t n = 0;
  for (const auto& row : bits) n += static_cast<std::size_t>(std::count(row.begin(), row.end(), true));
  return n;
}

Rational OccurrenceMatrix::density() const { return ratio(ones(), rows.size() * columns.size()); }

OccurrenceMatrix occurrence_matrix(const Formula& f, std::size_t clause_cap) {
  const auto polys = distinct_polynomials(to_dnf(f, clause_cap));
  OccurrenceMatrix m;
  m.columns.assign(polys.begin(), polys.end());
  std::set<VarId> vars;
  for (const auto& p : m.columns) {
    for (VarId v : p.variables()) vars.insert(v);
  }
  m.rows.assign(vars.begin(), vars.end());
  for (VarId v : m.rows) {
    std::vector<bool> row;
    for (const auto& p : m.columns) row.push_back(p.degree_in(v) >= 1);
    m.bits.push_back(std::move(row));
  }
  return m;
}

ProblemStats analyze_problem(const std::string& id, const Formula& matrix, std::size_t clause_cap) {
  const auto clauses = to_dnf(matrix, clause_cap);
  ProblemStats s;
  s.id = id;
  s.clauses = clauses.size();
  std::set<Atom> atoms;
  for (const auto& clause : clauses) {
    s.literals += clause.size();
    atoms.insert(clause.begin(), clause.end());
  }
  s.atoms = atoms.size();

  const auto polys = distinct_polynomials(clauses);
  s.polynomials = polys.size();
  std::set<VarId> vars;
  Rational degree_sum = 0;
  Rational variable_degree_sum = 0;
  for (const auto& p : polys) {
    for (VarId v : p.variables()) vars.insert(v);
    s.max_total_degree = std::max(s.max_total_degree, p.total_degree());
    const unsigned vd = max_variable_degree(p);
    s.max_variable_degree = std::max(s.max_variable_degree, vd);
    degree_sum += p.total_degree();
    variable_degree_sum += vd;
  }
  s.variables = vars.size();
  if (!polys.empty()) {
    s.mean_total_degree = degree_sum / static_cast<long>(polys.size());
    s.mean_polynomial_variable_degree = variable_degree_sum / static_cast<long>(polys.size());
  }
  s.polynomials_per_variable = ratio(s.polynomials, s.variables);

  std::size_t ones = 0;
  for (const auto& p : polys) ones += p.variables().size();
  s.density = ratio(ones, s.variables * s.polynomials);
  return s;
}

const std::vector<std::string>& stats_metric_names() {
  static const std::vector<std::string> names = {
      "clauses",          "atoms",     "literals",           "polynomials",
      "variables",        "max_total_degree", "mean_total_degree", "max_variable_degree",
      "mean_polynomial_variable_degree", "polynomials_per_variable", "density"};
  return names;
}

Rational metric_value(const ProblemStats& row, const std::string& metric) {
  if (metric == "clauses") return static_cast<long>(row.clauses);
  if (metric == "atoms") return static_cast<long>(row.atoms);
  if (metric == "literals") return static_cast<long>(row.literals);
  if (metric == "polynomials") return static_cast<long>(row.polynomials);
  if (metric == "variables") return static_cast<long>(row.variables);
  if (metric == "max_total_degree") return static_cast<long>(row.max_total_degree);
  if (metric == "mean_total_degree") return row.mean_total_degree;
  if (metric == "max_variable_degree") return static_cast<long>(row.max_variable_degree);
  if (metric == "mean_polynomial_variable_degree") return row.mean_polynomial_variable_degree;
  if (metric == "polynomials_per_variable") return row.polynomials_per_variable;
  if (metric == "density") return row.density;
  throw Error("unknown metric '" + metric + "'");
}

StatsReport aggregate(std::vector<ProblemStats> rows) {
  if (rows.empty()) throw Error("aggregate needs at least one row");
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  StatsReport report;
  for (const auto& metric : stats_metric_names()) {
    std::vector<Rational> values;
    for (const auto& row : rows) values.push_back(metric_value(row, metric));
    std::sort(values.begin(), values.end());
    Rational sum = 0;
    for (const auto& v : values) sum += v;
    report.aggregates[metric] = {values.front(), values.back(), sum / static_cast<long>(values.size()),
                                 values[(values.size() - 1) / 2]};
  }
  report.rows = std::move(rows);
  return report;
}

std::string format_decimal(const Rational& value, int places) {
  Integer scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const Rational scaled = abs(value) * scale;
  // floor(x + 1/2) on the magnitude rounds halves away from zero.
  Integer digits = (scaled.get_num() * 2 + scaled.get_den()) / (scaled.get_den() * 2);
  std::string text = digits.get_str();
  if (places > 0) {
    if (text.size() <= static_cast<std::size_t>(places)) text.insert(0, places + 1 - text.size(), '0');
    text.insert(text.size() - places, ".");
  }
  if (value < 0 && digits != 0) text.insert(0, "-");
  return text;
}

std::string to_csv(const StatsReport& report) {
  std::ostringstream out;
  out << "id";
  for (const auto& m : stats_metric_names()) out << ',' << m;
  out << '\n';
  for (const auto& row : report.rows) {
    out << row.id;
    for (const auto& m : stats_metric_names()) {
      const Rational v = metric_value(row, m);
      out << ',' << (v.get_den() == 1 ? v.get_num().get_str() : format_decimal(v, 4));
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const StatsReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r = {{"id", row.id}};
    for (const auto& m : stats_metric_names()) r[m] = to_string(metric_value(row, m));
    rows.push_back(std::move(r));
  }
  nlohmann::json aggregates = nlohmann::json::object();
  for (const auto& [metric, s] : report.aggregates) {
    const int places = places_for(metric);
    aggregates[metric] = {{"min", format_decimal(s.min, places)},
                          {"max", format_decimal(s.max, places)},
                          {"mean", format_decimal(s.mean, places)},
                          {"median", format_decimal(s.median, places)},
                          {"mean_exact", to_string(s.mean)}};
  }
  return {{"rows", std::move(rows)}, {"aggregates", std::move(aggregates)}};
}

}  // namespace econqe
