#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace skirental {

// Dual certificates run on prices up to e^{m/delta}, far beyond double range
// for the larger schedules, so this module computes in long double.
using real = long double;

/// Dual of the button LP in its auxiliary form: maximize w subject to
///   w <= u_t + b_t * sum_j v_j              for all t
///   u_s - u_t <= b_t * sum_{j>s} v_j         for all s < t
///   u_m = 0,  v >= 0.
struct DualSolution {
  std::vector<real> v;
  std::vector<real> u;
  real w = 0;
};

struct RandLBParams {
  double epsilon = 1.0;
  double delta = 100.0;
  double c_over_delta = 0.25;
  std::uint64_t m = 800;
};

/// Smallest c/delta for which the analytic dual is feasible.
inline double min_c_over_delta(double epsilon) {
  const double e = std::numbers::e;
  return -std::log(e - epsilon) - std::log(std::log(e / (e - epsilon)));
}

inline void check_lb_params(const RandLBParams& p) {
  const double e = std::numbers::e;
  if (!(p.epsilon > 0.0 && p.epsilon < e - 1.0)) throw std::invalid_argument("epsilon must lie in (0, e - 1)");
  if (!(p.delta > 0.0) || !std::isfinite(p.delta)) throw std::invalid_argument("delta must be positive");
  if (p.m < 1) throw std::invalid_argument("m must be positive");
  if (!(p.c_over_delta >= min_c_over_delta(p.epsilon)))
    throw std::invalid_argument("c/delta is below the feasibility threshold");
  if (!(static_cast<double>(p.m) / p.delta >= std::log(e / p.epsilon)))
    throw std::invalid_argument("m/delta must be at least ln(e/epsilon)");
  if (!(p.c_over_delta * p.delta < static_cast<double>(p.m))) throw std::invalid_argument("c must be below m");
}

/// b_j = e^{j/delta}, j = 1..m.
inline std::vector<real> lb_instance_prices(const RandLBParams& p) {
  std::vector<real> b(p.m);
  for (std::uint64_t j = 1; j <= p.m; ++j) b[j - 1] = std::exp(static_cast<real>(j) / static_cast<real>(p.delta));
  return b;
}

namespace detail {

// Neumaier sum in long double.
struct RealSum {
  real sum = 0, carry = 0;
  void add(real x) {
    const real t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  real value() const { return sum + carry; }
};

// tail[s] = sum_{j > s} v_j for s = 0..m (1-based j), so tail[0] is the total.
inline std::vector<real> tail_sums(const std::vector<real>& v) {
  std::vector<real> tail(v.size() + 1, 0);
  RealSum acc;
  for (std::size_t j = v.size(); j-- > 0;) {
    acc.add(v[j]);
    tail[j] = acc.value();
  }
  return tail;
}

}  // namespace detail

/// The closed-form dual: v_j = e^{-(j-1)/delta}(1 - e^{-1/delta}),
/// u_j = ((e - epsilon)/delta)(m - c - j)_+ with c = c_over_delta * delta,
/// and w the minimum of u_t + b_t sum v over t. Preconditions unchecked.
inline DualSolution analytic_dual_unchecked(const RandLBParams& p) {
  const real delta = p.delta;
  const real c = static_cast<real>(p.c_over_delta) * delta;
  const real m = static_cast<real>(p.m);
  const real slope = (std::numbers::e_v<real> - static_cast<real>(p.epsilon)) / delta;
  const real width = -std::expm1(-1 / delta);
  DualSolution d;
  d.v.resize(p.m);
  d.u.resize(p.m);
  for (std::uint64_t j = 1; j <= p.m; ++j) {
    const real jr = static_cast<real>(j);
    d.v[j - 1] = std::exp(-(jr - 1) / delta) * width;
    d.u[j - 1] = slope * std::max<real>(m - c - jr, 0);
  }
  const real total = detail::tail_sums(d.v)[0];
  const auto b = lb_instance_prices(p);
  d.w = std::numeric_limits<real>::infinity();
  for (std::uint64_t t = 0; t < p.m; ++t) d.w = std::min(d.w, d.u[t] + b[t] * total);
  return d;
}

inline DualSolution analytic_dual(const RandLBParams& p) {
  check_lb_params(p);
  return analytic_dual_unchecked(p);
}

/// For fixed v, the largest feasible u (backwards from u_m = 0) and w.
/// Quadratic in m; meant for small instances.
inline DualSolution dual_from_v(const std::vector<real>& prices, std::vector<real> v) {
  if (prices.size() != v.size() || prices.empty()) throw std::invalid_argument("dimension mismatch");
  for (real x : v)
    if (!(x >= 0)) throw std::invalid_argument("v must be nonnegative");
  const std::size_t m = prices.size();
  const auto tail = detail::tail_sums(v);
  DualSolution d;
  d.u.assign(m, 0);
  for (std::size_t s = m - 1; s-- > 0;) {
    real best = std::numeric_limits<real>::infinity();
    for (std::size_t t = s + 1; t < m; ++t) best = std::min(best, d.u[t] + prices[t] * tail[s + 1]);
    d.u[s] = best;
  }
  d.w = std::numeric_limits<real>::infinity();
  for (std::size_t t = 0; t < m; ++t) d.w = std::min(d.w, d.u[t] + prices[t] * tail[0]);
  d.v = std::move(v);
  return d;
}

enum class PairCheckMode { Auto, Pairwise, Envelope };

inline constexpr std::size_t kPairwiseLimit = 20000;
inline constexpr real kDualTolerance = 1e-9L;

struct FamilyCheck {
  std::string name;
  std::uint64_t rows = 0;
  real max_violation = 0;  // relative to max(1, |rhs|)
  std::size_t worst_s = 0;  // 1-based; 0 when nothing is violated
  std::size_t worst_t = 0;
};

struct DualReport {
  std::vector<FamilyCheck> families;  // objective, pairs, terminal, nonnegativity
  PairCheckMode mode = PairCheckMode::Pairwise;
  bool feasible = true;
  real max_violation = 0;
};

namespace detail {

inline void record(FamilyCheck& f, real lhs, real rhs, std::size_t s, std::size_t t) {
  ++f.rows;
  const real miss = (lhs - rhs) / std::max<real>(1, std::fabs(rhs));
  if (miss > f.max_violation) {
    f.max_violation = miss;
    f.worst_s = s;
    f.worst_t = t;
  }
}

// Lines y = a + b x with slopes added in nonincreasing order; queries at
// nondecreasing x return the lower envelope.
class LowerEnvelope {
 public:
  struct Line {
    real a, b;
    std::size_t id;
    real at(real x) const { return a + b * x; }
  };

  void add(Line l) {
    if (!lines_.empty() && lines_.back().b == l.b) {
      if (lines_.back().a <= l.a) return;
      lines_.pop_back();
    }
    while (lines_.size() >= 2 && redundant(lines_[lines_.size() - 2], lines_.back(), l)) lines_.pop_back();
    lines_.push_back(l);
  }

  const Line& query(real x) {
    while (lines_.size() >= 2 && lines_[1].at(x) <= lines_[0].at(x)) lines_.pop_front();
    return lines_.front();
  }

 private:
  // l2 never wins once l3 (smaller slope) meets l1 no later than l2 does.
  static bool redundant(const Line& l1, const Line& l2, const Line& l3) {
    return (l3.a - l1.a) * (l1.b - l2.b) <= (l2.a - l1.a) * (l1.b - l3.b);
  }

  std::deque<Line> lines_;
};

}  // namespace detail

/// Checks every row of the auxiliary dual. Pair rows are checked one by one
/// up to kPairwiseLimit buttons; beyond that (or on request) each s is
/// checked against the tightest t via a lower envelope of the lines
/// u_t + b_t x, which covers every pair exactly once per s.
inline DualReport check_dual_feasibility(const std::vector<real>& prices, const DualSolution& d,
                                         PairCheckMode mode = PairCheckMode::Auto, real tol = kDualTolerance) {
  const std::size_t m = prices.size();
  if (m == 0 || d.v.size() != m || d.u.size() != m) throw std::invalid_argument("dimension mismatch");
  if (mode == PairCheckMode::Auto) mode = m <= kPairwiseLimit ? PairCheckMode::Pairwise : PairCheckMode::Envelope;
  for (std::size_t j = 1; j < m; ++j)
    if (prices[j] < prices[j - 1]) throw std::invalid_argument("prices must be nondecreasing");

  DualReport report;
  report.mode = mode;
  FamilyCheck objective{"w <= u_t + b_t*sum(v)"}, pairs{"u_s - u_t <= b_t*sum_{j>s}(v)"}, terminal{"u_m = 0"},
      nonneg{"v >= 0"};
  const auto tail = detail::tail_sums(d.v);

  for (std::size_t t = 0; t < m; ++t) detail::record(objective, d.w, d.u[t] + prices[t] * tail[0], 0, t + 1);

  if (mode == PairCheckMode::Pairwise) {
    for (std::size_t s = 0; s + 1 < m; ++s)
      for (std::size_t t = s + 1; t < m; ++t) detail::record(pairs, d.u[s] - d.u[t], prices[t] * tail[s + 1], s + 1, t + 1);
  } else {
    detail::LowerEnvelope env;
    for (std::size_t s = m - 1; s-- > 0;) {
      env.add({d.u[s + 1], prices[s + 1], s + 1});
      const auto& best = env.query(tail[s + 1]);
      detail::record(pairs, d.u[s] - d.u[best.id], prices[best.id] * tail[s + 1], s + 1, best.id + 1);
      pairs.rows += m - 2 - s;  // the other pairs for this s are implied
    }
  }

  detail::record(terminal, std::fabs(d.u[m - 1]), 0, m, 0);
  for (std::size_t j = 0; j < m; ++j) detail::record(nonneg, -d.v[j], 0, j + 1, 0);

  for (FamilyCheck* f : {&objective, &pairs, &terminal, &nonneg}) {
    if (f->max_violation <= tol) f->max_violation = std::max<real>(f->max_violation, 0);
    report.max_violation = std::max(report.max_violation, f->max_violation);
    report.families.push_back(std::move(*f));
  }
  report.feasible = report.max_violation <= tol;
  return report;
}

struct NormalizedDual {
  double value = 0.0;  // w / sum_j b_j v_j
  real sum_bv = 0;
  DualSolution scaled;
  DualReport recheck;          // auxiliary-dual rows on the scaled solution
  real normalization_error = 0;  // |sum_j b_j v'_j - 1| after scaling
  bool feasible = false;
};

/// Divides the solution by sum_j b_j v_j and re-verifies the scaled rows,
/// including the normalization row sum_j b_j v_j = 1.
inline NormalizedDual normalize_dual(const std::vector<real>& prices, const DualSolution& d,
                                     PairCheckMode mode = PairCheckMode::Auto) {
  if (prices.size() != d.v.size()) throw std::invalid_argument("dimension mismatch");
  detail::RealSum acc;
  for (std::size_t j = 0; j < prices.size(); ++j) acc.add(prices[j] * d.v[j]);
  NormalizedDual out;
  out.sum_bv = acc.value();
  if (!(out.sum_bv > 0)) throw std::invalid_argument("sum of b_j v_j is zero");
  out.scaled = d;
  for (auto& x : out.scaled.v) x /= out.sum_bv;
  for (auto& x : out.scaled.u) x /= out.sum_bv;
  out.scaled.w /= out.sum_bv;
  out.value = static_cast<double>(out.scaled.w);
  detail::RealSum check;
  for (std::size_t j = 0; j < prices.size(); ++j) check.add(prices[j] * out.scaled.v[j]);
  out.normalization_error = std::fabs(check.value() - 1);
  out.recheck = check_dual_feasibility(prices, out.scaled, mode);
  out.feasible = out.recheck.feasible && out.normalization_error <= kDualTolerance;
  return out;
}

inline double normalized_dual_value(const std::vector<real>& prices, const DualSolution& d) {
  return normalize_dual(prices, d).value;
}

/// Closed-form lower estimate of the normalized analytic dual value:
/// (e - epsilon)(m/delta - c/delta) / ((m/delta) e^{1/delta}).
inline double analytic_value_bound(const RandLBParams& p) {
  const double md = static_cast<double>(p.m) / p.delta;
  return (std::numbers::e - p.epsilon) * (md - p.c_over_delta) / (md * std::exp(1.0 / p.delta));
}

}  // namespace skirental
