#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skirental/harness.hpp"
#include "skirental/opt_table.hpp"
#include "skirental/parallel.hpp"
#include "skirental/strategies.hpp"

namespace skirental {

/// A day count written in base C, so that counts like C^n stay exact for
/// any n. Digits are little-endian, each below the base, with no leading
/// zeros. The default value is zero in an unspecified base; it adopts the
/// base of whatever it is combined with.
class SymbolicDays {
 public:
  SymbolicDays() = default;

  SymbolicDays(std::uint64_t base, std::uint64_t value) : base_(checked_base(base)) {
    for (; value > 0; value /= base_) digits_.push_back(value % base_);
  }

  static SymbolicDays power(std::uint64_t base, std::size_t exponent) {
    SymbolicDays d;
    d.base_ = checked_base(base);
    d.digits_.assign(exponent + 1, 0);
    d.digits_.back() = 1;
    return d;
  }

  std::uint64_t base() const noexcept { return base_; }
  const std::vector<std::uint64_t>& digits() const noexcept { return digits_; }
  bool is_zero() const noexcept { return digits_.empty(); }

  friend SymbolicDays operator+(const SymbolicDays& a, const SymbolicDays& b) {
    if (a.is_zero()) return b.base_ == 0 ? a : b;
    if (b.is_zero()) return a;
    same_base(a, b);
    SymbolicDays out;
    out.base_ = a.base_;
    out.digits_.resize(std::max(a.digits_.size(), b.digits_.size()) + 1, 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < out.digits_.size(); ++i) {
      unsigned __int128 s = carry;
      if (i < a.digits_.size()) s += a.digits_[i];
      if (i < b.digits_.size()) s += b.digits_[i];
      out.digits_[i] = static_cast<std::uint64_t>(s % a.base_);
      carry = s / a.base_;
    }
    out.trim();
    return out;
  }

  SymbolicDays& operator+=(const SymbolicDays& other) { return *this = *this + other; }

  friend SymbolicDays operator*(const SymbolicDays& a, std::uint64_t times) {
    SymbolicDays out;
    out.base_ = a.base_;
    if (times == 0 || a.is_zero()) return out;
    unsigned __int128 carry = 0;
    for (std::uint64_t d : a.digits_) {
      const unsigned __int128 p = static_cast<unsigned __int128>(d) * times + carry;
      out.digits_.push_back(static_cast<std::uint64_t>(p % a.base_));
      carry = p / a.base_;
    }
    while (carry > 0) {
      out.digits_.push_back(static_cast<std::uint64_t>(carry % a.base_));
      carry /= a.base_;
    }
    return out;
  }

  friend bool operator==(const SymbolicDays& a, const SymbolicDays& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    same_base(a, b);
    return a.digits_ == b.digits_;
  }

  friend std::strong_ordering operator<=>(const SymbolicDays& a, const SymbolicDays& b) {
    if (a.is_zero() || b.is_zero()) return !a.is_zero() <=> !b.is_zero();
    same_base(a, b);
    if (a.digits_.size() != b.digits_.size()) return a.digits_.size() <=> b.digits_.size();
    for (std::size_t i = a.digits_.size(); i-- > 0;)
      if (a.digits_[i] != b.digits_[i]) return a.digits_[i] <=> b.digits_[i];
    return std::strong_ordering::equal;
  }

  /// e.g. "2*18^3 + 1*18^1"; "0" for zero.
  std::string to_string() const {
    if (is_zero()) return "0";
    std::string out;
    for (std::size_t i = digits_.size(); i-- > 0;) {
      if (digits_[i] == 0) continue;
      if (!out.empty()) out += " + ";
      out += std::to_string(digits_[i]);
      if (i > 0) out += "*" + std::to_string(base_) + "^" + std::to_string(i);
    }
    return out;
  }

 private:
  static std::uint64_t checked_base(std::uint64_t base) {
    if (base < 2) throw std::invalid_argument("symbolic base must be at least 2");
    return base;
  }

  static void same_base(const SymbolicDays& a, const SymbolicDays& b) {
    if (a.base_ != b.base_) throw std::logic_error("mixing day counts of different bases");
  }

  void trim() {
    while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
  }

  std::uint64_t base_ = 0;
  std::vector<std::uint64_t> digits_;
};

inline bool is_infinite(const SymbolicDays&) noexcept { return false; }

/// Optimum table of the reduction instance: option i (1-based) costs i and
/// lasts C^i days, for i = 1..n. Everything is closed form.
///
/// With an integer budget J the most days are covered by floor(J / n)
/// copies of option n plus one option (J mod n) when that remainder is
/// nonzero. Every option index is reported 0-based like OptTable.
class SymbolicTable {
 public:
  using days_type = SymbolicDays;
  using segment_type = BasicSegment<SymbolicDays>;

  SymbolicTable(std::uint64_t base, std::size_t n) : base_(base), n_(n) {
    if (base < 2) throw std::invalid_argument("base must be at least 2");
    if (n < 1) throw std::invalid_argument("need at least one option");
  }

  std::uint64_t base() const noexcept { return base_; }
  std::size_t option_count() const noexcept { return n_; }

  SymbolicDays one_day() const { return SymbolicDays(base_, 1); }
  SymbolicDays duration(std::size_t option) const {
    check_option(option);
    return SymbolicDays::power(base_, option + 1);
  }
  double option_cost(std::size_t option) const {
    check_option(option);
    return static_cast<double>(option + 1);
  }

  /// Most days coverable with total cost at most `budget` (an integer).
  SymbolicDays max_days(std::uint64_t budget) const { return best_segment(budget).total_days; }

  double opt_cost(const SymbolicDays& t) { return static_cast<double>(opt_budget(t)); }

  std::uint64_t opt_budget(const SymbolicDays& t) const {
    if (t.is_zero()) return 0;
    std::uint64_t lo = 0, hi = 1;
    while (max_days(hi) < t) {
      lo = hi;
      if (hi > std::numeric_limits<std::uint64_t>::max() / 2) throw std::overflow_error("day count too large");
      hi *= 2;
    }
    while (hi - lo > 1) {
      const auto mid = lo + (hi - lo) / 2;
      (max_days(mid) < t ? lo : hi) = mid;
    }
    return hi;
  }

  segment_type opt_segment(const SymbolicDays& t) { return best_segment(opt_budget(t)); }

  segment_type best_within_budget(double budget) {
    if (!(budget >= 1.0)) return {};
    if (!(budget < 0x1.0p63)) throw std::overflow_error("budget too large");
    return best_segment(static_cast<std::uint64_t>(std::floor(budget)));
  }

 private:
  void check_option(std::size_t option) const {
    if (option >= n_) throw std::out_of_range("option index out of range");
  }

  segment_type best_segment(std::uint64_t budget) const {
    segment_type seg;
    seg.total_days = SymbolicDays(base_, 1) * 0;
    const std::uint64_t full = budget / n_, rest = budget % n_;
    if (rest > 0) {
      seg.purchases.push_back({static_cast<std::size_t>(rest - 1), 1});
      seg.total_days += SymbolicDays::power(base_, rest);
    }
    if (full > 0) {
      seg.purchases.push_back({n_ - 1, full});
      seg.total_days += SymbolicDays::power(base_, n_) * full;
    }
    seg.total_cost = static_cast<double>(budget);
    return seg;
  }

  std::uint64_t base_;
  std::size_t n_;
};

struct ButtonInstance {
  std::vector<std::uint64_t> prices;  // b_1 <= ... <= b_m
  std::size_t first_target = 1;        // J, 1-based
  std::optional<std::size_t> prediction;  // predicted J, 1-based
};

inline const ButtonInstance& validate(const ButtonInstance& b) {
  if (b.prices.empty()) throw std::invalid_argument("button instance has no buttons");
  for (std::size_t j = 0; j < b.prices.size(); ++j) {
    if (b.prices[j] < 1) throw std::invalid_argument("button prices must be positive");
    if (j > 0 && b.prices[j] < b.prices[j - 1]) throw std::invalid_argument("button prices must be nondecreasing");
  }
  const auto m = b.prices.size();
  if (b.first_target < 1 || b.first_target > m) throw std::invalid_argument("first target must lie in 1..m");
  if (b.prediction && (*b.prediction < 1 || *b.prediction > m))
    throw std::invalid_argument("predicted target must lie in 1..m");
  return b;
}

/// Prices given as reals must be positive integers for the reduction.
inline std::vector<std::uint64_t> integer_prices(const std::vector<double>& prices) {
  if (prices.empty()) throw std::invalid_argument("button instance has no buttons");
  std::vector<std::uint64_t> out;
  for (double p : prices) {
    if (!(p >= 1.0) || p != std::floor(p) || p > 0x1.0p53) throw std::invalid_argument("button prices must be positive integers");
    out.push_back(static_cast<std::uint64_t>(p));
  }
  return out;
}

struct ReductionConfig {
  double epsilon = 0.5;
  double rho = std::numbers::e;  // robustness of the ski strategy; may be +inf
  double chi = std::numbers::e;  // its consistency, used when rho is infinite
  std::uint64_t C = 2;
  std::size_t n = 1;
};

inline ReductionConfig make_reduction_config(const std::vector<std::uint64_t>& prices, double epsilon, double rho,
                                             double chi) {
  if (prices.empty()) throw std::invalid_argument("button instance has no buttons");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(rho >= 1.0)) throw std::invalid_argument("rho must be at least 1");
  const bool finite = std::isfinite(rho);
  if (!finite && !(chi >= 1.0 && std::isfinite(chi))) throw std::invalid_argument("chi must be finite and at least 1");
  const double factor = std::ceil((finite ? rho : chi) / epsilon);
  const std::uint64_t b_m = prices.back();
  if (!(factor * static_cast<double>(b_m) < 0x1.0p62)) throw std::overflow_error("reduction base too large");
  ReductionConfig cfg{epsilon, rho, chi, static_cast<std::uint64_t>(factor) * b_m, static_cast<std::size_t>(b_m)};
  if (cfg.C < 2) cfg.C = 2;
  return cfg;
}

/// Uses the strategy's own consistency and robustness.
inline ReductionConfig make_reduction_config(const std::vector<std::uint64_t>& prices, double epsilon,
                                             const StrategyParams& params) {
  const auto g = guarantee_bounds(params.kind, params.lambda);
  return make_reduction_config(prices, epsilon, g.robustness, g.consistency);
}

/// Ski instance the reduction runs its strategy on; prediction = C^{b_Jhat}.
struct ReducedInstance {
  SymbolicTable table;
  std::optional<SymbolicDays> prediction;
};

inline ReducedInstance reduce_to_ski(const ButtonInstance& buttons, const ReductionConfig& cfg) {
  validate(buttons);
  if (cfg.n != buttons.prices.back()) throw std::invalid_argument("reduction config does not match the prices");
  ReducedInstance out{SymbolicTable(cfg.C, cfg.n), std::nullopt};
  if (buttons.prediction) out.prediction = SymbolicDays::power(cfg.C, buttons.prices[*buttons.prediction - 1]);
  return out;
}

/// Largest 1-based index j with b_j <= option_cost, or none.
inline std::optional<std::size_t> map_option_to_click(const std::vector<std::uint64_t>& prices,
                                                      std::uint64_t option_cost) {
  const auto it = std::upper_bound(prices.begin(), prices.end(), option_cost);
  if (it == prices.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - prices.begin());
}

enum class Termination { TargetHit, Forced };

inline std::string_view to_string(Termination t) noexcept {
  return t == Termination::TargetHit ? "target-hit" : "forced";
}

struct ButtonClick {
  std::size_t index = 0;  // 1-based
  std::uint64_t price = 0;
};

struct ButtonTrace {
  std::vector<ButtonClick> clicks;
  std::uint64_t total_price = 0;
  Termination terminated_by = Termination::TargetHit;
  double alpha = 0.0;            // 0 for deterministic strategies
  std::uint64_t lazy_ski_cost = 0;   // options actually bought
  std::uint64_t eager_ski_cost = 0;  // full cost of every fetched segment
  std::uint64_t surcharge = 0;       // b_m when forced
  bool strictly_increasing = true;

  /// Price is at most the eager ski cost, plus b_m when forced.
  bool within_bound() const { return total_price <= eager_ski_cost + surcharge; }
};

/// Runs the ski strategy on the reduction instance and clicks buttons as it
/// buys. A randomized strategy without alpha draws it from `seed`.
inline ButtonTrace run_reduction(const ButtonInstance& buttons, StrategyParams params, const ReductionConfig& cfg,
                                 std::uint64_t seed = 0) {
  auto reduced = reduce_to_ski(buttons, cfg);
  if (uses_prediction(params.kind)) {
    if (!reduced.prediction) throw std::invalid_argument(std::string(to_string(params.kind)) + " needs a predicted target");
    params.prediction = buttons.prices[*buttons.prediction - 1];
  }
  if (is_randomized(params.kind) && !params.alpha) params.alpha = alpha_from_seed(seed);
  const auto& prices = buttons.prices;
  const std::size_t m = prices.size();

  ButtonTrace trace;
  if (params.alpha && is_randomized(params.kind)) trace.alpha = *params.alpha;
  auto& table = reduced.table;
  auto plan = make_plan<SymbolicTable>(table, params, reduced.prediction);

  auto click = [&](std::size_t j) {
    if (!trace.clicks.empty() && j <= trace.clicks.back().index) trace.strictly_increasing = false;
    trace.clicks.push_back({j, prices[j - 1]});
    trace.total_price += prices[j - 1];
  };

  std::vector<BasicSegment<SymbolicDays>::Purchase> order;
  std::size_t cursor = 0;
  while (true) {
    while (cursor == order.size()) {
      auto seg = plan.next();
      if (!seg) throw std::logic_error("ski strategy stopped buying");
      trace.eager_ski_cost += static_cast<std::uint64_t>(seg->total_cost);
      order = seg->purchases;
      // Longest first, as the lazy purchaser would buy them.
      std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.option > b.option; });
      cursor = 0;
    }
    const std::size_t option = order[cursor].option;
    if (--order[cursor].count == 0) ++cursor;
    const std::uint64_t cost = option + 1;
    trace.lazy_ski_cost += cost;
    if (const auto j = map_option_to_click(prices, cost)) {
      click(*j);
      if (*j >= buttons.first_target) {
        trace.terminated_by = Termination::TargetHit;
        return trace;
      }
    }
    if (trace.lazy_ski_cost >= cfg.C) {
      click(m);
      trace.surcharge = prices[m - 1];
      trace.terminated_by = Termination::Forced;
      return trace;
    }
  }
}

struct ButtonMonteCarlo {
  double mean_price = 0.0;
  double standard_error = 0.0;
  std::size_t runs = 0;
  std::size_t forced = 0;
  std::size_t bound_violations = 0;        // traces with price above the eager ledger bound
  std::size_t non_increasing = 0;          // traces whose clicks did not strictly increase
  bool surcharge_always_b_m = true;
};

/// Runs seeds 0..runs-1 (alpha drawn per seed) and aggregates prices.
inline ButtonMonteCarlo run_reduction_monte_carlo(const ButtonInstance& buttons, const StrategyParams& params,
                                                  const ReductionConfig& cfg, std::size_t runs, std::size_t jobs = 1) {
  if (runs < 1) throw std::invalid_argument("need at least one run");
  std::vector<ButtonTrace> traces(runs);
  parallel_for(runs, jobs, [&](std::size_t s, std::size_t) { traces[s] = run_reduction(buttons, params, cfg, s); });
  ButtonMonteCarlo out;
  out.runs = runs;
  CompensatedSum sum;
  for (const auto& t : traces) sum.add(static_cast<double>(t.total_price));
  out.mean_price = sum.value() / static_cast<double>(runs);
  CompensatedSum sq;
  for (const auto& t : traces) {
    const double d = static_cast<double>(t.total_price) - out.mean_price;
    sq.add(d * d);
    if (t.terminated_by == Termination::Forced) {
      ++out.forced;
      if (t.surcharge != buttons.prices.back()) out.surcharge_always_b_m = false;
    }
    if (!t.within_bound()) ++out.bound_violations;
    if (!t.strictly_increasing) ++out.non_increasing;
  }
  if (runs > 1) out.standard_error = std::sqrt(sq.value() / static_cast<double>(runs - 1) / static_cast<double>(runs));
  return out;
}

}  // namespace skirental
