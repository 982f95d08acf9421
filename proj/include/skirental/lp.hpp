#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "skirental/format.hpp"

namespace skirental {

enum class RowSense { Equal, LessEqual };

struct LPTerm {
  std::size_t var = 0;
  double coef = 0.0;
};

struct LPRow {
  std::string name;
  std::vector<LPTerm> terms;
  RowSense sense = RowSense::Equal;
  double rhs = 0.0;
};

/// Button LP over prices b_1..b_m: minimize g subject to
///   prob:    sum_j x_j = 1
///   flow t:  sum_{j>t} y_{t,j} - x_t - sum_{j<t} y_{j,t} = 0,  t = 1..m-1
///   ratio J: sum_j b_j (x_j + sum_{t < min(J,j)} y_{t,j}) - b_J g <= 0
/// with x, y >= 0 and g free. Variables are ordered x_1..x_m, then y_{t,j}
/// row-major over t < j, then g.
class LPModel {
 public:
  explicit LPModel(std::vector<double> prices) : prices_(std::move(prices)) {
    if (prices_.empty()) throw std::invalid_argument("LP needs at least one button");
    for (std::size_t j = 0; j < prices_.size(); ++j) {
      if (!(prices_[j] > 0.0) || !std::isfinite(prices_[j])) throw std::invalid_argument("prices must be positive");
      if (j > 0 && prices_[j] < prices_[j - 1]) throw std::invalid_argument("prices must be nondecreasing");
    }
    build();
  }

  std::size_t m() const noexcept { return prices_.size(); }
  const std::vector<double>& prices() const noexcept { return prices_; }
  std::size_t variable_count() const noexcept { return m() + y_count() + 1; }
  std::size_t y_count() const noexcept { return m() * (m() - 1) / 2; }

  /// 1-based indices, as in the model.
  std::size_t x_var(std::size_t j) const {
    if (j < 1 || j > m()) throw std::out_of_range("x index out of range");
    return j - 1;
  }
  std::size_t y_var(std::size_t t, std::size_t j) const {
    if (t < 1 || j <= t || j > m()) throw std::out_of_range("y index out of range");
    // Rows t' < t hold m - t' entries each.
    const std::size_t before = (t - 1) * m() - (t - 1) * t / 2;
    return m() + before + (j - t - 1);
  }
  std::size_t gamma_var() const noexcept { return variable_count() - 1; }

  const std::vector<LPRow>& rows() const noexcept { return rows_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  /// Variables other than g are nonnegative.
  bool is_free(std::size_t var) const noexcept { return var == gamma_var(); }

 private:
  void build() {
    const std::size_t n = m();
    names_.resize(variable_count());
    for (std::size_t j = 1; j <= n; ++j) names_[x_var(j)] = "x" + std::to_string(j);
    for (std::size_t t = 1; t < n; ++t)
      for (std::size_t j = t + 1; j <= n; ++j) names_[y_var(t, j)] = "y" + std::to_string(t) + "_" + std::to_string(j);
    names_[gamma_var()] = "g";

    LPRow prob{"prob", {}, RowSense::Equal, 1.0};
    for (std::size_t j = 1; j <= n; ++j) prob.terms.push_back({x_var(j), 1.0});
    rows_.push_back(std::move(prob));

    for (std::size_t t = 1; t < n; ++t) {
      LPRow flow{"flow" + std::to_string(t), {}, RowSense::Equal, 0.0};
      for (std::size_t j = t + 1; j <= n; ++j) flow.terms.push_back({y_var(t, j), 1.0});
      flow.terms.push_back({x_var(t), -1.0});
      for (std::size_t j = 1; j < t; ++j) flow.terms.push_back({y_var(j, t), -1.0});
      rows_.push_back(std::move(flow));
    }

    for (std::size_t J = 1; J <= n; ++J) {
      LPRow ratio{"ratio" + std::to_string(J), {}, RowSense::LessEqual, 0.0};
      for (std::size_t j = 1; j <= n; ++j) {
        ratio.terms.push_back({x_var(j), prices_[j - 1]});
        for (std::size_t t = 1; t < std::min(J, j); ++t) ratio.terms.push_back({y_var(t, j), prices_[j - 1]});
      }
      ratio.terms.push_back({gamma_var(), -prices_[J - 1]});
      rows_.push_back(std::move(ratio));
    }
  }

  std::vector<double> prices_;
  std::vector<std::string> names_;
  std::vector<LPRow> rows_;
};

inline LPModel build_primal_lp(const std::vector<double>& prices) { return LPModel(prices); }

struct PrimalSolution {
  std::vector<double> x;                   // x_1..x_m
  std::vector<std::vector<double>> y;      // y[t-1][j-1] for t < j; other entries ignored
  double gamma = 0.0;
};

inline std::vector<double> flatten(const LPModel& model, const PrimalSolution& sol) {
  const auto m = model.m();
  if (sol.x.size() != m) throw std::invalid_argument("x has the wrong length");
  if (m > 1 && sol.y.size() < m - 1) throw std::invalid_argument("y has the wrong shape");
  std::vector<double> values(model.variable_count(), 0.0);
  for (std::size_t j = 1; j <= m; ++j) values[model.x_var(j)] = sol.x[j - 1];
  for (std::size_t t = 1; t < m; ++t) {
    if (sol.y[t - 1].size() != m) throw std::invalid_argument("y has the wrong shape");
    for (std::size_t j = t + 1; j <= m; ++j) values[model.y_var(t, j)] = sol.y[t - 1][j - 1];
  }
  values[model.gamma_var()] = sol.gamma;
  return values;
}

struct RowCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;      // rhs - lhs
  double violation = 0.0;  // 0 when satisfied
  bool binding = false;
};

struct FeasibilityReport {
  std::vector<RowCheck> rows;  // constraint rows, then one "bound <var>" per negative variable
  double max_violation = 0.0;
  bool feasible = true;

  std::vector<std::string> binding_rows() const {
    std::vector<std::string> out;
    for (const auto& r : rows)
      if (r.binding) out.push_back(r.name);
    return out;
  }
};

inline constexpr double kFeasibilityTolerance = 1e-9;

/// Evaluates rows at `values`; a row counts as violated when it misses by
/// more than tol times the magnitude of its terms (at least 1).
inline FeasibilityReport evaluate_rows(const std::vector<LPRow>& rows, const std::vector<double>& values,
                                       const std::vector<bool>& free_vars, const std::vector<std::string>& names,
                                       double tol = kFeasibilityTolerance) {
  FeasibilityReport report;
  for (const auto& row : rows) {
    RowCheck rc;
    rc.name = row.name;
    double scale = std::max(1.0, std::abs(row.rhs));
    for (const auto& term : row.terms) {
      if (term.var >= values.size()) throw std::invalid_argument("row refers to an unknown variable");
      const double v = term.coef * values[term.var];
      rc.lhs += v;
      scale = std::max(scale, std::abs(v));
    }
    rc.rhs = row.rhs;
    rc.slack = rc.rhs - rc.lhs;
    const double miss = row.sense == RowSense::Equal ? std::abs(rc.slack) : -rc.slack;
    rc.violation = miss > tol * scale ? miss : 0.0;
    rc.binding = std::abs(rc.slack) <= tol * scale;
    report.rows.push_back(rc);
  }
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (free_vars[v] || values[v] >= -tol) continue;
    report.rows.push_back({"bound " + names[v], values[v], 0.0, -values[v], -values[v], false});
  }
  for (const auto& r : report.rows) report.max_violation = std::max(report.max_violation, r.violation);
  report.feasible = report.max_violation == 0.0;
  return report;
}

inline FeasibilityReport check_primal_feasibility(const LPModel& model, const PrimalSolution& sol,
                                                  double tol = kFeasibilityTolerance) {
  std::vector<bool> free_vars(model.variable_count(), false);
  free_vars[model.gamma_var()] = true;
  return evaluate_rows(model.rows(), flatten(model, sol), free_vars, model.names(), tol);
}

/// Smallest gamma that satisfies every ratio row for the given x and y.
inline double min_feasible_gamma(const LPModel& model, PrimalSolution sol) {
  double best = -std::numeric_limits<double>::infinity();
  sol.gamma = 0.0;
  const auto values = flatten(model, sol);
  for (std::size_t J = 1; J <= model.m(); ++J) {
    const auto& row = model.rows()[model.m() + J - 1];
    double lhs = 0.0;
    for (const auto& term : row.terms)
      if (term.var != model.gamma_var()) lhs += term.coef * values[term.var];
    best = std::max(best, lhs / model.prices()[J - 1]);
  }
  return best;
}

/// Marginals of a randomized button strategy given as weighted click
/// sequences (1-based, strictly increasing, run with only button m a
/// target). Gamma is set to the smallest feasible value.
inline PrimalSolution primal_from_click_sequences(const LPModel& model,
                                                  const std::vector<std::vector<std::size_t>>& sequences,
                                                  const std::vector<double>& weights) {
  if (sequences.size() != weights.size()) throw std::invalid_argument("one weight per sequence");
  const auto m = model.m();
  PrimalSolution sol;
  sol.x.assign(m, 0.0);
  sol.y.assign(m > 1 ? m - 1 : 0, std::vector<double>(m, 0.0));
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("weights must not all be zero");
  for (std::size_t k = 0; k < sequences.size(); ++k) {
    const auto& seq = sequences[k];
    if (seq.empty() || seq.back() != m) throw std::invalid_argument("click sequences must end at button m");
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq[i] < 1 || seq[i] > m) throw std::invalid_argument("button index out of range");
      if (i > 0 && seq[i] <= seq[i - 1]) throw std::invalid_argument("click sequences must strictly increase");
    }
    const double p = weights[k] / total;
    sol.x[seq[0] - 1] += p;
    for (std::size_t i = 1; i < seq.size(); ++i) sol.y[seq[i - 1] - 1][seq[i] - 1] += p;
  }
  sol.gamma = min_feasible_gamma(model, sol);
  return sol;
}

/// LP text in CPLEX LP syntax. Coefficients use shortest round-trip decimal
/// form, so the output is byte-stable.
inline std::string export_lp(const LPModel& model) {
  std::ostringstream out;
  out << "\\ button LP, m = " << model.m() << "\n";
  out << "min\n obj: g\nst\n";
  for (const auto& row : model.rows()) {
    out << " " << row.name << ":";
    for (const auto& term : row.terms) {
      out << (term.coef < 0 ? " - " : " + ") << format_number(std::abs(term.coef)) << " "
          << model.names()[term.var];
    }
    out << (row.sense == RowSense::Equal ? " = " : " <= ") << format_number(row.rhs) << "\n";
  }
  out << "bounds\n g free\nend\n";
  return out.str();
}

/// The subset of LP syntax written by export_lp.
struct ParsedLP {
  std::string objective_var;
  std::vector<std::string> names;  // in order of first appearance
  std::vector<LPRow> rows;
  std::vector<bool> free_vars;

  std::size_t index_of(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::out_of_range("unknown variable " + name);
    return static_cast<std::size_t>(it - names.begin());
  }

  FeasibilityReport evaluate(const std::map<std::string, double>& values, double tol = kFeasibilityTolerance) const {
    std::vector<double> v(names.size(), 0.0);
    for (const auto& [name, value] : values) v[index_of(name)] = value;
    return evaluate_rows(rows, v, free_vars, names, tol);
  }
};

inline ParsedLP parse_lp(std::istream& in) {
  ParsedLP lp;
  auto var = [&](const std::string& name) {
    const auto it = std::find(lp.names.begin(), lp.names.end(), name);
    if (it != lp.names.end()) return static_cast<std::size_t>(it - lp.names.begin());
    lp.names.push_back(name);
    lp.free_vars.push_back(false);
    return lp.names.size() - 1;
  };
  auto number = [](const std::string& text) {
    const auto v = parse_number(text);
    if (!v) throw std::invalid_argument("bad number in LP text: " + text);
    return *v;
  };
  enum class Section { None, Objective, Rows, Bounds, End } section = Section::None;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto c = line.find('\\'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() == 1 && tok[0] == "min") { section = Section::Objective; continue; }
    if (tok.size() == 1 && tok[0] == "st") { section = Section::Rows; continue; }
    if (tok.size() == 1 && tok[0] == "bounds") { section = Section::Bounds; continue; }
    if (tok.size() == 1 && tok[0] == "end") { section = Section::End; continue; }
    switch (section) {
      case Section::Objective:
        if (tok.size() != 2) throw std::invalid_argument("unsupported objective: " + line);
        lp.objective_var = tok[1];
        var(tok[1]);
        break;
      case Section::Rows: {
        if (tok.size() < 3 || tok[0].back() != ':') throw std::invalid_argument("bad row: " + line);
        LPRow row;
        row.name = tok[0].substr(0, tok[0].size() - 1);
        std::size_t i = 1;
        for (; i + 2 < tok.size() && (tok[i] == "+" || tok[i] == "-"); i += 3) {
          const double coef = number(tok[i + 1]);
          row.terms.push_back({var(tok[i + 2]), tok[i] == "-" ? -coef : coef});
        }
        if (i + 2 != tok.size()) throw std::invalid_argument("bad row: " + line);
        if (tok[i] == "=") row.sense = RowSense::Equal;
        else if (tok[i] == "<=") row.sense = RowSense::LessEqual;
        else throw std::invalid_argument("bad row sense: " + line);
        row.rhs = number(tok[i + 1]);
        lp.rows.push_back(std::move(row));
        break;
      }
      case Section::Bounds:
        if (tok.size() != 2 || tok[1] != "free") throw std::invalid_argument("unsupported bound: " + line);
        lp.free_vars[var(tok[0])] = true;
        break;
      default:
        throw std::invalid_argument("unexpected line: " + line);
    }
  }
  if (section != Section::End) throw std::invalid_argument("LP text is missing 'end'");
  return lp;
}

}  // namespace skirental
