#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "skirental/days.hpp"
#include "skirental/instance.hpp"

namespace skirental {

/// A sub-solution appended by a strategy: purchases grouped per option in
/// ascending option index, with their summed cost and coverage.
template <typename DaysT>
struct BasicSegment {
  struct Purchase {
    std::size_t option = 0;
    std::uint64_t count = 0;
    friend bool operator==(const Purchase&, const Purchase&) = default;
  };

  std::vector<Purchase> purchases;
  double total_cost = 0.0;
  DaysT total_days{};

  bool empty() const noexcept { return purchases.empty(); }

  std::uint64_t purchase_count() const noexcept {
    std::uint64_t n = 0;
    for (const auto& p : purchases) n += p.count;
    return n;
  }

  friend bool operator==(const BasicSegment&, const BasicSegment&) = default;
};

using Segment = BasicSegment<Days>;

/// Minimum cost to cover at least t days, tabulated by dynamic programming.
///
/// opt(0) = 0 and opt(t) = min over options i of c_i + opt(max(t - d_i, 0)),
/// where an unbounded option contributes c_i alone. Ties go to the smallest
/// option index. The table doubles its horizon whenever a query exceeds it,
/// so a single table must not be shared between threads.
class OptTable {
 public:
  using days_type = Days;
  using segment_type = Segment;

  explicit OptTable(RentalInstance instance, std::uint64_t initial_horizon = 64)
      : instance_(validate(std::move(instance))) {
    for (std::size_t i = 0; i < instance_.options.size(); ++i) {
      const auto& opt = instance_.options[i];
      if (opt.duration.is_infinite() && (!cheapest_infinite_ || opt.cost < instance_.options[*cheapest_infinite_].cost))
        cheapest_infinite_ = i;
    }
    costs_.push_back(0.0);
    choice_.push_back(kNoChoice);
    extend_to(std::max<std::uint64_t>(initial_horizon, 1));
  }

  const RentalInstance& instance() const noexcept { return instance_; }
  std::size_t option_count() const noexcept { return instance_.options.size(); }
  std::uint64_t horizon() const noexcept { return costs_.size() - 1; }

  Days one_day() const noexcept { return Days{1}; }
  Days duration(std::size_t option) const { return instance_.options.at(option).duration; }
  double option_cost(std::size_t option) const { return instance_.options.at(option).cost; }

  std::optional<double> cheapest_infinite() const {
    if (!cheapest_infinite_) return std::nullopt;
    return instance_.options[*cheapest_infinite_].cost;
  }
  std::optional<std::size_t> cheapest_infinite_option() const noexcept { return cheapest_infinite_; }

  double opt_cost(std::uint64_t t) {
    extend_to(t);
    return costs_[t];
  }

  /// opt of an unbounded horizon is the cheapest unbounded option.
  double opt_cost(Days t) {
    if (t.is_finite()) return opt_cost(t.count());
    if (!cheapest_infinite_) throw std::domain_error("no option covers an unbounded horizon");
    return instance_.options[*cheapest_infinite_].cost;
  }

  Segment opt_segment(std::uint64_t t) {
    extend_to(t);
    std::vector<std::uint64_t> counts(option_count(), 0);
    std::uint64_t rest = t;
    while (rest > 0) {
      const auto i = choice_[rest];
      ++counts[i];
      const auto d = instance_.options[i].duration;
      if (d.is_infinite()) break;
      rest = rest > d.count() ? rest - d.count() : 0;
    }
    Segment seg = from_counts(counts);
    seg.total_cost = costs_[t];
    return seg;
  }

  Segment opt_segment(Days t) {
    if (t.is_finite()) return opt_segment(t.count());
    if (!cheapest_infinite_) throw std::domain_error("no option covers an unbounded horizon");
    return single(*cheapest_infinite_);
  }

  /// b(j): the optimum solution covering the most days among those costing at
  /// most `budget`; empty when the budget is below opt(1). Comparisons are
  /// exact IEEE comparisons.
  Segment best_within_budget(double budget) {
    if (!(budget >= opt_cost(std::uint64_t{1}))) return Segment{};
    if (cheapest_infinite_ && instance_.options[*cheapest_infinite_].cost <= budget)
      return single(*cheapest_infinite_);
    // opt is nondecreasing and exceeds the budget eventually, so bracket the
    // last affordable day count by doubling, then bisect.
    std::uint64_t lo = 1, hi = 2;
    while (opt_cost(hi) <= budget) {
      lo = hi;
      if (hi > std::numeric_limits<std::uint64_t>::max() / 4)
        throw std::overflow_error("budget covers too many days to tabulate");
      hi *= 2;
    }
    while (hi - lo > 1) {
      const auto mid = lo + (hi - lo) / 2;
      (opt_cost(mid) <= budget ? lo : hi) = mid;
    }
    return opt_segment(lo);
  }

  /// Distinct values of opt(t), t >= 1, that are strictly below `limit`, in
  /// increasing order. Includes the cheapest unbounded cost when below limit.
  std::vector<double> distinct_costs_below(double limit) {
    std::vector<double> out;
    const double plateau = cheapest_infinite() ? *cheapest_infinite() : std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 1;; ++t) {
      const double c = opt_cost(t);
      if (!(c < limit) || c >= plateau) break;
      if (out.empty() || out.back() != c) out.push_back(c);
    }
    if (plateau < limit && (out.empty() || out.back() != plateau)) out.push_back(plateau);
    return out;
  }

 private:
  static constexpr std::uint32_t kNoChoice = std::numeric_limits<std::uint32_t>::max();

  void extend_to(std::uint64_t t) {
    if (t < costs_.size()) return;
    std::uint64_t target = std::max<std::uint64_t>(costs_.size(), 1);
    while (target <= t) target *= 2;
    costs_.reserve(target);
    choice_.reserve(target);
    for (std::uint64_t s = costs_.size(); s < target; ++s) {
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t arg = kNoChoice;
      for (std::size_t i = 0; i < instance_.options.size(); ++i) {
        const auto& opt = instance_.options[i];
        double cand = opt.cost;
        if (opt.duration.is_finite()) {
          const auto d = opt.duration.count();
          cand += costs_[s > d ? s - d : 0];
        }
        if (cand < best) {
          best = cand;
          arg = static_cast<std::uint32_t>(i);
        }
      }
      costs_.push_back(best);
      choice_.push_back(arg);
    }
  }

  Segment single(std::size_t option) const {
    Segment seg;
    seg.purchases.push_back({option, 1});
    seg.total_cost = instance_.options[option].cost;
    seg.total_days = instance_.options[option].duration;
    return seg;
  }

  Segment from_counts(const std::vector<std::uint64_t>& counts) const {
    Segment seg;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] == 0) continue;
      seg.purchases.push_back({i, counts[i]});
      seg.total_days += instance_.options[i].duration * counts[i];
    }
    return seg;
  }

  RentalInstance instance_;
  std::vector<double> costs_;
  std::vector<std::uint32_t> choice_;
  std::optional<std::size_t> cheapest_infinite_;
};

/// Divides every cost by opt(1) so that the normalized instance has opt(1) = 1.
inline RentalInstance normalize(const RentalInstance& instance) {
  OptTable table(instance, 1);
  const double opt1 = table.opt_cost(std::uint64_t{1});
  RentalInstance out = table.instance();
  for (auto& opt : out.options) opt.cost /= opt1;
  out.scale /= opt1;
  return out;
}

}  // namespace skirental
