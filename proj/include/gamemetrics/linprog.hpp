#pragma once

// Dense two-phase simplex. Problems are small (a few hundred variables at
// most), so a full tableau with Bland's rule is used throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gamemetrics/errors.hpp"

namespace gamemetrics::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
/// Pivot and reduced-cost threshold.
inline constexpr double kPivotTolerance = 1e-9;

enum class Relation { LessEq, Equal, GreaterEq };

struct Term {
  std::size_t var;
  double coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation;
  double rhs;
};

/// A linear program in minimization form. Variables are declared in order and
/// referenced by the index returned from add_variable().
class LpProblem {
 public:
  std::size_t add_variable(std::string name, double lower = 0.0,
                           double upper = kInfinity) {
    names_.push_back(std::move(name));
    lower_.push_back(lower);
    upper_.push_back(upper);
    objective_.push_back(0.0);
    return names_.size() - 1;
  }

  void set_objective(std::size_t var, double coef) {
    check_var(var);
    objective_[var] = coef;
  }

  void add_constraint(std::vector<Term> terms, Relation relation, double rhs) {
    constraints_.push_back({std::move(terms), relation, rhs});
  }

  std::size_t num_variables() const { return names_.size(); }
  const std::string& name(std::size_t var) const { return names_.at(var); }
  double lower(std::size_t var) const { return lower_.at(var); }
  double upper(std::size_t var) const { return upper_.at(var); }
  double objective(std::size_t var) const { return objective_.at(var); }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
  }

  /// Throws ContractError when a constraint references an undeclared variable,
  /// a bound pair is empty, or any coefficient is not finite.
  void check_well_formed() const {
    for (std::size_t j = 0; j < names_.size(); ++j) {
      if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j] ||
          lower_[j] == kInfinity || upper_[j] == -kInfinity)
        throw ContractError("lp: invalid bounds on variable '" + names_[j] + "'");
      if (!std::isfinite(objective_[j]))
        throw ContractError("lp: non-finite objective coefficient on '" + names_[j] + "'");
    }
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
      const auto& c = constraints_[i];
      if (!std::isfinite(c.rhs))
        throw ContractError("lp: non-finite right-hand side in constraint " + std::to_string(i));
      for (const auto& t : c.terms) {
        if (t.var >= names_.size())
          throw ContractError("lp: constraint " + std::to_string(i) +
                              " references undeclared variable " + std::to_string(t.var));
        if (!std::isfinite(t.coef))
          throw ContractError("lp: non-finite coefficient in constraint " + std::to_string(i));
      }
    }
  }

 private:
  void check_var(std::size_t var) const {
    if (var >= names_.size())
      throw ContractError("lp: undeclared variable " + std::to_string(var));
  }

  std::vector<std::string> names_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> objective_;
  std::vector<Constraint> constraints_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> point;
};

namespace detail {

// How an original variable maps onto nonnegative tableau columns:
// x = offset + sign * column (+ minus-part for free variables).
struct ColumnMap {
  double offset = 0.0;
  double sign = 1.0;
  std::size_t column = 0;
  std::optional<std::size_t> negative_column;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  // Objective row lives at index rows_.
  double& cost(std::size_t c) { return at(rows_, c); }
  double& objective_value() { return at(rows_, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const std::size_t width = cols_ + 1;
    double* prow = &data_[pr * width];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < width; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* row = &data_[r * width];
      const double factor = row[pc];
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) row[c] -= factor * prow[c];
      row[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  // Minimizes the objective row over columns with enterable[c] set.
  // Returns false if unbounded.
  bool optimize(const std::vector<char>& enterable, const std::vector<char>& active_rows) {
    const std::size_t max_pivots = 50000 + 50 * (rows_ + cols_);
    for (std::size_t iter = 0; iter < max_pivots; ++iter) {
      // Bland: lowest-index improving column.
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (enterable[c] && cost(c) < -kPivotTolerance) {
          enter = c;
          break;
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = rows_;
      double best = kInfinity;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!active_rows[r]) continue;
        const double a = at(r, enter);
        if (a <= kPivotTolerance) continue;
        const double ratio = rhs(r) / a;
        if (leave == rows_ || ratio < best - 1e-12) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + 1e-12 && basis_[r] < basis_[leave]) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
    throw NumericError("lp: pivot limit exceeded");
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

struct StandardForm {
  std::vector<ColumnMap> maps;
  std::size_t structural = 0;  // columns backing original variables
  double objective_offset = 0.0;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::vector<Relation> relations;
  std::vector<double> rhs;
  std::vector<double> costs;
};

inline StandardForm to_standard_form(const LpProblem& p) {
  StandardForm sf;
  const std::size_t n = p.num_variables();
  sf.maps.resize(n);
  std::size_t col = 0;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (column, bound)
  for (std::size_t j = 0; j < n; ++j) {
    ColumnMap& m = sf.maps[j];
    const double lo = p.lower(j), hi = p.upper(j);
    if (std::isfinite(lo)) {
      m = {lo, 1.0, col++, std::nullopt};
      if (std::isfinite(hi)) upper_rows.emplace_back(m.column, hi - lo);
    } else if (std::isfinite(hi)) {
      m = {hi, -1.0, col++, std::nullopt};
    } else {
      m.offset = 0.0;
      m.sign = 1.0;
      m.column = col++;
      m.negative_column = col++;
    }
  }
  sf.structural = col;
  sf.costs.assign(col, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const ColumnMap& m = sf.maps[j];
    const double c = p.objective(j);
    sf.objective_offset += c * m.offset;
    sf.costs[m.column] += c * m.sign;
    if (m.negative_column) sf.costs[*m.negative_column] -= c;
  }
  for (const auto& con : p.constraints()) {
    std::vector<std::pair<std::size_t, double>> row;
    double rhs = con.rhs;
    for (const auto& t : con.terms) {
      const ColumnMap& m = sf.maps[t.var];
      rhs -= t.coef * m.offset;
      row.emplace_back(m.column, t.coef * m.sign);
      if (m.negative_column) row.emplace_back(*m.negative_column, -t.coef);
    }
    sf.rows.push_back(std::move(row));
    sf.relations.push_back(con.relation);
    sf.rhs.push_back(rhs);
  }
  for (auto [c, bound] : upper_rows) {
    sf.rows.push_back({{c, 1.0}});
    sf.relations.push_back(Relation::LessEq);
    sf.rhs.push_back(bound);
  }
  return sf;
}

struct SimplexRun {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> columns;  // values of structural columns
  double value = 0.0;
};

// with_objective=false stops after phase 1.
inline SimplexRun run_simplex(const StandardForm& sf, bool with_objective) {
  const std::size_t m = sf.rows.size();
  const std::size_t ns = sf.structural;
  // Column layout: structural | slack/surplus (one per inequality row) | artificial.
  std::vector<std::size_t> slack_col(m, SIZE_MAX), art_col(m, SIZE_MAX);
  std::vector<double> sign(m, 1.0);
  std::size_t next = ns;
  for (std::size_t i = 0; i < m; ++i) {
    Relation rel = sf.relations[i];
    if (sf.rhs[i] < 0.0) {
      sign[i] = -1.0;
      if (rel == Relation::LessEq) rel = Relation::GreaterEq;
      else if (rel == Relation::GreaterEq) rel = Relation::LessEq;
    }
    if (rel != Relation::Equal) slack_col[i] = next++;
  }
  const std::size_t first_art = next;
  for (std::size_t i = 0; i < m; ++i) {
    Relation rel = sf.relations[i];
    if (sign[i] < 0.0 && rel != Relation::Equal)
      rel = rel == Relation::LessEq ? Relation::GreaterEq : Relation::LessEq;
    if (rel != Relation::LessEq) art_col[i] = next++;
  }
  const std::size_t ncols = next;

  Tableau tab(m, ncols);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto [c, a] : sf.rows[i]) tab.at(i, c) += sign[i] * a;
    tab.rhs(i) = sign[i] * sf.rhs[i];
    Relation rel = sf.relations[i];
    if (sign[i] < 0.0 && rel != Relation::Equal)
      rel = rel == Relation::LessEq ? Relation::GreaterEq : Relation::LessEq;
    if (rel == Relation::LessEq) {
      tab.at(i, slack_col[i]) = 1.0;
      tab.basis()[i] = slack_col[i];
    } else {
      if (rel == Relation::GreaterEq) tab.at(i, slack_col[i]) = -1.0;
      tab.at(i, art_col[i]) = 1.0;
      tab.basis()[i] = art_col[i];
    }
  }

  std::vector<char> active(m, 1);
  std::vector<char> enterable(ncols, 1);
  double rhs_scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) rhs_scale = std::max(rhs_scale, std::abs(sf.rhs[i]));

  // Phase 1: minimize the sum of artificials, expressed in nonbasic terms.
  if (first_art < ncols) {
    for (std::size_t c = 0; c <= ncols; ++c) tab.at(m, c) = 0.0;
    for (std::size_t c = first_art; c < ncols; ++c) tab.cost(c) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (art_col[i] == SIZE_MAX) continue;
      for (std::size_t c = 0; c <= ncols; ++c) tab.at(m, c) -= tab.at(i, c);
    }
    tab.optimize(enterable, active);
    const double infeas = -tab.objective_value();
    if (infeas > 1e-9 * rhs_scale) return {LpStatus::Infeasible, {}, 0.0};
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis()[i] < first_art) continue;
      std::size_t pc = ncols;
      double best = kPivotTolerance;
      for (std::size_t c = 0; c < first_art; ++c) {
        if (std::abs(tab.at(i, c)) > best) {
          best = std::abs(tab.at(i, c));
          pc = c;
        }
      }
      if (pc == ncols) {
        active[i] = 0;
      } else {
        tab.pivot(i, pc);
      }
    }
    for (std::size_t c = first_art; c < ncols; ++c) enterable[c] = 0;
  }

  auto extract = [&]() {
    std::vector<double> cols(ns, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (!active[i]) continue;
      const std::size_t b = tab.basis()[i];
      if (b < ns) cols[b] = std::max(0.0, tab.rhs(i));
    }
    return cols;
  };

  if (!with_objective) return {LpStatus::Optimal, extract(), 0.0};

  // Phase 2: reduced costs for the real objective.
  for (std::size_t c = 0; c <= ncols; ++c) tab.at(m, c) = 0.0;
  for (std::size_t c = 0; c < ns; ++c) tab.cost(c) = sf.costs[c];
  for (std::size_t i = 0; i < m; ++i) {
    if (!active[i]) continue;
    const std::size_t b = tab.basis()[i];
    const double cb = b < ns ? sf.costs[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= ncols; ++c) tab.at(m, c) -= cb * tab.at(i, c);
  }
  if (!tab.optimize(enterable, active)) return {LpStatus::Unbounded, {}, 0.0};
  SimplexRun run{LpStatus::Optimal, extract(), 0.0};
  double v = 0.0;
  for (std::size_t c = 0; c < ns; ++c) v += sf.costs[c] * run.columns[c];
  run.value = v;
  return run;
}

inline std::vector<double> recover_point(const StandardForm& sf, const std::vector<double>& cols) {
  std::vector<double> x(sf.maps.size());
  for (std::size_t j = 0; j < sf.maps.size(); ++j) {
    const ColumnMap& m = sf.maps[j];
    x[j] = m.offset + m.sign * cols[m.column];
    if (m.negative_column) x[j] -= cols[*m.negative_column];
  }
  return x;
}

}  // namespace detail

/// Solves min c'x subject to the problem's constraints and bounds.
inline LpOutcome solve(const LpProblem& p) {
  p.check_well_formed();
  const auto sf = detail::to_standard_form(p);
  auto run = detail::run_simplex(sf, true);
  LpOutcome out;
  out.status = run.status;
  if (run.status != LpStatus::Optimal) return out;
  out.point = detail::recover_point(sf, run.columns);
  double v = 0.0;
  for (std::size_t j = 0; j < p.num_variables(); ++j) v += p.objective(j) * out.point[j];
  out.value = v;
  return out;
}

/// Phase 1 only; returns a witness point when the constraint set is nonempty.
inline std::optional<std::vector<double>> feasible(const LpProblem& p) {
  p.check_well_formed();
  const auto sf = detail::to_standard_form(p);
  auto run = detail::run_simplex(sf, false);
  if (run.status != LpStatus::Optimal) return std::nullopt;
  return detail::recover_point(sf, run.columns);
}

/// Largest violation of any constraint or bound by `point`.
inline double max_violation(const LpProblem& p, const std::vector<double>& point) {
  double worst = 0.0;
  for (std::size_t j = 0; j < p.num_variables(); ++j) {
    worst = std::max(worst, p.lower(j) - point[j]);
    worst = std::max(worst, point[j] - p.upper(j));
  }
  for (const auto& c : p.constraints()) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * point[t.var];
    switch (c.relation) {
      case Relation::LessEq: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::GreaterEq: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

}  // namespace gamemetrics::lp
