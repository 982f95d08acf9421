#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace skirental {

/// Outcome of evaluating one inequality lhs <= rhs on a grid.
struct ClaimResult {
  std::string name;
  std::size_t points = 0;
  double max_violation = 0.0;  // max of (lhs - rhs) / |rhs|, clipped at 0 when none
  double worst_slack = 0.0;    // min of (rhs - lhs) / |rhs| over the grid
  std::string worst_at;
  std::optional<double> equality_residual;  // |lhs - rhs| / |rhs| at the stated extremizer
};

struct ClaimsReport {
  std::vector<ClaimResult> claims;
  double max_violation = 0.0;
  double max_equality_residual = 0.0;
  bool passed(double tol = 1e-12) const { return max_violation <= tol && max_equality_residual <= tol; }
};

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

// (0, 1] in `n` steps: k / n for k = 1..n.
inline std::vector<double> unit_grid(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 1; k <= n; ++k) out[k - 1] = static_cast<double>(k) / static_cast<double>(n);
  return out;
}

inline double relative_gap(double lhs, double rhs) { return (lhs - rhs) / std::abs(rhs); }

inline void observe(ClaimResult& c, double lhs, double rhs, const std::function<std::string()>& where) {
  ++c.points;
  const double gap = relative_gap(lhs, rhs);
  if (c.points == 1 || -gap < c.worst_slack) {
    c.worst_slack = 0.0 - gap;
    c.worst_at = where();
  }
  c.max_violation = std::max(c.max_violation, gap);
}

inline std::string fmt(double x) { return std::to_string(x); }

}  // namespace detail

// Both sides of each inequality, with the extremizer where it is tight.

inline double claim1_lhs(double beta, double lambda, double r) {
  const double s = std::exp(2.0 - r);
  return s / beta + (std::log(beta) + r - 1.0) * s / (lambda * beta);
}
inline double claim2_lhs(double beta, double lambda, double r) {
  const double s = std::exp(1.0 - r);
  return s / beta + s * (std::log(beta) + r) / (lambda * beta);
}
inline double exp_over(double x) { return std::exp(x) / x; }

/// Evaluates the inequalities behind the randomized trade-off analysis on
/// logarithmic grids of `resolution` points per claim. The two-parameter
/// claims also sweep lambda and r over 16 values each in (0, 1].
inline ClaimsReport verify_analysis_claims(std::size_t resolution) {
  if (resolution < 10) throw std::invalid_argument("grid resolution must be at least 10");
  using detail::observe;
  const double e = std::numbers::e;
  const auto betas = detail::log_grid(std::exp(-6.0), std::exp(6.0), resolution);
  const auto sub = detail::unit_grid(16);
  ClaimsReport report;

  {
    ClaimResult c;
    c.name = "claim1: e^{2-r}/b + (ln b + r - 1) e^{2-r}/(lambda b) <= e^lambda/lambda";
    double residual = 0.0;
    for (double l : sub)
      for (double r : sub) {
        for (double b : betas)
          observe(c, claim1_lhs(b, l, r), exp_over(l), [&] { return "beta=" + detail::fmt(b) + " lambda=" + detail::fmt(l) + " r=" + detail::fmt(r); });
        const double bstar = std::exp(2.0 - l - r);
        residual = std::max(residual, std::abs(detail::relative_gap(claim1_lhs(bstar, l, r), exp_over(l))));
      }
    c.equality_residual = residual;
    report.claims.push_back(c);
  }
  {
    ClaimResult c;
    c.name = "claim2: e^{1-r}/b + e^{1-r}(ln b + r)/(lambda b) <= e^lambda/lambda";
    double residual = 0.0;
    for (double l : sub)
      for (double r : sub) {
        for (double b : betas)
          observe(c, claim2_lhs(b, l, r), exp_over(l), [&] { return "beta=" + detail::fmt(b) + " lambda=" + detail::fmt(l) + " r=" + detail::fmt(r); });
        const double bstar = std::exp(1.0 - l - r);
        residual = std::max(residual, std::abs(detail::relative_gap(claim2_lhs(bstar, l, r), exp_over(l))));
      }
    c.equality_residual = residual;
    report.claims.push_back(c);
  }
  {
    ClaimResult c;
    c.name = "claim3: e(x - ln x) <= e^x/x";
    for (double x : betas) observe(c, e * (x - std::log(x)), exp_over(x), [&] { return "x=" + detail::fmt(x); });
    c.equality_residual = std::abs(detail::relative_gap(e * (1.0 - std::log(1.0)), exp_over(1.0)));
    report.claims.push_back(c);
  }
  {
    ClaimResult c;
    c.name = "x + e <= e^x/x on (0, 1/e]";
    for (double x : detail::log_grid(std::exp(-6.0), 1.0 / e, resolution))
      observe(c, x + e, exp_over(x), [&] { return "x=" + detail::fmt(x); });
    report.claims.push_back(c);
  }
  {
    ClaimResult c;
    c.name = "1 + e - (ln x + 1)/x <= e^x/x on [1/e, 1]";
    for (double x : detail::log_grid(1.0 / e, 1.0, resolution))
      observe(c, 1.0 + e - (std::log(x) + 1.0) / x, exp_over(x), [&] { return "x=" + detail::fmt(x); });
    c.equality_residual = std::abs(detail::relative_gap(1.0 + e - (std::log(1.0) + 1.0), exp_over(1.0)));
    report.claims.push_back(c);
  }
  {
    ClaimResult c;
    c.name = "x - ln x + e - 1 <= e^x/x";
    for (double x : betas) observe(c, x - std::log(x) + e - 1.0, exp_over(x), [&] { return "x=" + detail::fmt(x); });
    c.equality_residual = std::abs(detail::relative_gap(1.0 - std::log(1.0) + e - 1.0, exp_over(1.0)));
    report.claims.push_back(c);
  }

  for (const auto& c : report.claims) {
    report.max_violation = std::max(report.max_violation, c.max_violation);
    if (c.equality_residual) report.max_equality_residual = std::max(report.max_equality_residual, *c.equality_residual);
  }
  return report;
}

}  // namespace skirental
