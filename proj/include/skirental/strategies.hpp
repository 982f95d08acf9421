#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "skirental/opt_table.hpp"

namespace skirental {

/// What a plan needs from an optimum table: opt(t), its solution, b(j), and
/// option metadata. OptTable satisfies it over Days; the button reduction
/// provides a symbolic table over exponent-encoded day counts.
template <typename T>
concept SkiTable = requires(T& table, const T& ctable, typename T::days_type days, double budget, std::size_t i) {
  typename T::segment_type;
  { ctable.one_day() } -> std::same_as<typename T::days_type>;
  { ctable.duration(i) } -> std::same_as<typename T::days_type>;
  { ctable.option_cost(i) } -> std::convertible_to<double>;
  { ctable.option_count() } -> std::convertible_to<std::size_t>;
  { table.opt_cost(days) } -> std::convertible_to<double>;
  { table.opt_segment(days) } -> std::same_as<typename T::segment_type>;
  { table.best_within_budget(budget) } -> std::same_as<typename T::segment_type>;
};

enum class StrategyKind { DetComp, DetLA, RandComp, RandLA, AnandDoubling };

inline std::string_view to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::DetComp: return "det";
    case StrategyKind::DetLA: return "det-la";
    case StrategyKind::RandComp: return "rand";
    case StrategyKind::RandLA: return "rand-la";
    case StrategyKind::AnandDoubling: return "anand";
  }
  return "?";
}

inline StrategyKind parse_strategy(std::string_view name) {
  for (auto k : {StrategyKind::DetComp, StrategyKind::DetLA, StrategyKind::RandComp, StrategyKind::RandLA,
                 StrategyKind::AnandDoubling})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

constexpr bool is_randomized(StrategyKind kind) noexcept {
  return kind == StrategyKind::RandComp || kind == StrategyKind::RandLA;
}

constexpr bool uses_prediction(StrategyKind kind) noexcept {
  return kind == StrategyKind::DetLA || kind == StrategyKind::RandLA;
}

struct StrategyParams {
  StrategyKind kind = StrategyKind::DetComp;
  std::optional<std::uint64_t> prediction;  // predicted number of skiing days
  std::optional<double> lambda;             // trust level in [0, 1]; 0 trusts fully
  std::optional<double> alpha;              // sampled budget multiplier in [1, e)
};

inline void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 1.0 && alpha < std::numbers::e)) throw std::invalid_argument("alpha must lie in [1, e)");
}

/// Validates everything except alpha, which exact-expectation callers omit.
inline void check_params_without_alpha(const StrategyParams& p) {
  if (uses_prediction(p.kind)) {
    if (!p.prediction) throw std::invalid_argument(std::string(to_string(p.kind)) + " needs a prediction");
    if (*p.prediction < 1) throw std::invalid_argument("prediction must be at least one day");
    if (!p.lambda) throw std::invalid_argument(std::string(to_string(p.kind)) + " needs lambda");
    check_lambda(*p.lambda);
  }
}

inline void check_params(const StrategyParams& p) {
  check_params_without_alpha(p);
  if (is_randomized(p.kind)) {
    if (!p.alpha) throw std::invalid_argument(std::string(to_string(p.kind)) + " needs alpha");
    check_alpha(*p.alpha);
  }
}

/// Inverse-CDF sample of the density 1/alpha on [1, e): alpha = e^u.
inline double sample_alpha(double unit_uniform) {
  if (!(unit_uniform >= 0.0 && unit_uniform < 1.0)) throw std::invalid_argument("uniform sample must lie in [0, 1)");
  return std::exp(unit_uniform);
}

/// lambda = e^{-(q + r)} with integer q >= 0 and r in (0, 1].
struct LambdaDecomposition {
  std::uint64_t q = 0;
  double r = 1.0;
};

inline LambdaDecomposition decompose_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  const double x = -std::log(lambda);
  // lambda = e^{-i} lands on an integer only up to rounding; snap so that r = 1.
  const double nearest = std::round(x);
  if (nearest >= 1.0 && std::abs(x - nearest) <= 1e-12 * nearest)
    return {static_cast<std::uint64_t>(nearest) - 1, 1.0};
  const double q = std::ceil(x) - 1.0;
  return {static_cast<std::uint64_t>(q), x - q};
}

/// Consistency of the randomized learning-augmented plan.
inline double chi(double lambda) {
  check_lambda(lambda);
  if (lambda < 1.0 / std::numbers::e) return 1.0 + lambda;
  return (std::numbers::e + 1.0) * lambda - std::log(lambda) - 1.0;
}

struct Guarantee {
  double consistency = 0.0;
  double robustness = 0.0;  // +inf when the plan is not robust
};

inline Guarantee guarantee_bounds(StrategyKind kind, std::optional<double> lambda = std::nullopt) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case StrategyKind::DetComp:
    case StrategyKind::AnandDoubling:
      return {4.0, 4.0};
    case StrategyKind::RandComp:
      return {std::numbers::e, std::numbers::e};
    case StrategyKind::DetLA: {
      if (!lambda) throw std::invalid_argument("det-la bounds need lambda");
      check_lambda(*lambda);
      const double l = *lambda;
      return {std::max(1.0 + 2.0 * l, 4.0 * l), l == 0.0 ? inf : 2.0 + 2.0 / l};
    }
    case StrategyKind::RandLA: {
      if (!lambda) throw std::invalid_argument("rand-la bounds need lambda");
      const double l = *lambda;
      check_lambda(l);
      if (l == 0.0) return {1.0, inf};
      return {chi(l), std::exp(l) / l};
    }
  }
  throw std::invalid_argument("unknown strategy");
}

namespace detail {

template <typename DaysT>
bool covers_forever(const DaysT& days) {
  return is_infinite(days);
}

}  // namespace detail

/// Deterministic doubling on spent cost: iteration 1 appends opt(1), and
/// iteration i >= 2 appends b(sol_{i-1}) where sol is the cumulative cost.
template <SkiTable Table>
class DetCompetitivePlan {
 public:
  using segment_type = typename Table::segment_type;

  explicit DetCompetitivePlan(Table& table) : table_(&table) {}

  std::optional<segment_type> next() {
    if (exhausted_) return std::nullopt;
    segment_type seg = iteration_ == 0 ? table_->opt_segment(table_->one_day()) : table_->best_within_budget(sol_);
    ++iteration_;
    sol_ += seg.total_cost;
    exhausted_ = detail::covers_forever(seg.total_days);
    return seg;
  }

  std::size_t iteration() const noexcept { return iteration_; }
  double cumulative_cost() const noexcept { return sol_; }
  bool exhausted() const noexcept { return exhausted_; }

 private:
  Table* table_;
  std::size_t iteration_ = 0;
  double sol_ = 0.0;
  bool exhausted_ = false;
};

/// Deterministic plan with a prediction. Doubles while the spend stays within
/// lambda * opt(prediction); once past that it buys opt(prediction) if the
/// spend is still below it, and after that goes back to doubling.
template <SkiTable Table>
class DetLearningAugmentedPlan {
 public:
  using segment_type = typename Table::segment_type;
  using days_type = typename Table::days_type;
  enum class Phase { FirstIgnore, Respect, SecondIgnore };

  DetLearningAugmentedPlan(Table& table, days_type prediction, double lambda)
      : table_(&table), prediction_(prediction), lambda_(lambda) {
    check_lambda(lambda);
    if (prediction < table.one_day()) throw std::invalid_argument("prediction must be at least one day");
    opt_prediction_ = table.opt_cost(prediction);
    threshold_ = lambda * opt_prediction_;
    phase_ = table.opt_cost(table.one_day()) <= threshold_ ? Phase::FirstIgnore : Phase::Respect;
    started_in_ignore_ = phase_ == Phase::FirstIgnore;
  }

  std::optional<segment_type> next() {
    if (exhausted_) return std::nullopt;
    segment_type seg;
    switch (phase_) {
      case Phase::FirstIgnore:
        seg = iteration_ == 0 ? table_->opt_segment(table_->one_day()) : table_->best_within_budget(sol_);
        ++iteration_;
        sol_ += seg.total_cost;
        if (sol_ > threshold_) {
          stop_iteration_ = iteration_;
          phase_ = sol_ <= opt_prediction_ ? Phase::Respect : Phase::SecondIgnore;
        }
        break;
      case Phase::Respect:
        seg = table_->opt_segment(prediction_);
        sol_ += seg.total_cost;
        respected_ = true;
        phase_ = Phase::SecondIgnore;
        break;
      case Phase::SecondIgnore:
        seg = table_->best_within_budget(sol_);
        sol_ += seg.total_cost;
        break;
    }
    exhausted_ = detail::covers_forever(seg.total_days);
    return seg;
  }

  Phase phase() const noexcept { return phase_; }
  bool started_in_ignore() const noexcept { return started_in_ignore_; }
  bool respected() const noexcept { return respected_; }
  /// Iteration at which the first ignore phase stopped (0 if it has not).
  std::size_t stop_iteration() const noexcept { return stop_iteration_; }
  double threshold() const noexcept { return threshold_; }
  double opt_prediction() const noexcept { return opt_prediction_; }
  double cumulative_cost() const noexcept { return sol_; }
  bool exhausted() const noexcept { return exhausted_; }

 private:
  Table* table_;
  days_type prediction_;
  double lambda_;
  double opt_prediction_ = 0.0;
  double threshold_ = 0.0;
  Phase phase_ = Phase::FirstIgnore;
  bool started_in_ignore_ = false;
  bool respected_ = false;
  std::size_t iteration_ = 0;
  std::size_t stop_iteration_ = 0;
  double sol_ = 0.0;
  bool exhausted_ = false;
};

// Phases whose budget overflows a double cannot be evaluated meaningfully.
inline constexpr std::size_t kMaxRandomizedPhases = 700;

/// Randomized plan: phase i = 0, 1, ... appends b(alpha * e^i); empty
/// budgets are skipped.
template <SkiTable Table>
class RandCompetitivePlan {
 public:
  using segment_type = typename Table::segment_type;

  RandCompetitivePlan(Table& table, double alpha) : table_(&table), alpha_(alpha) { check_alpha(alpha); }

  std::optional<segment_type> next() {
    while (!exhausted_) {
      if (phase_ >= kMaxRandomizedPhases) throw std::overflow_error("randomized plan ran out of phases");
      const double budget = phase_budget(phase_);
      ++phase_;
      segment_type seg = table_->best_within_budget(budget);
      if (seg.empty()) continue;
      sol_ += seg.total_cost;
      exhausted_ = detail::covers_forever(seg.total_days);
      return seg;
    }
    return std::nullopt;
  }

  double phase_budget(std::size_t i) const { return alpha_ * std::exp(static_cast<double>(i)); }
  std::size_t phase() const noexcept { return phase_; }
  double alpha() const noexcept { return alpha_; }
  double cumulative_cost() const noexcept { return sol_; }

 private:
  Table* table_;
  double alpha_;
  std::size_t phase_ = 0;
  double sol_ = 0.0;
  bool exhausted_ = false;
};

/// Parameters a randomized learning-augmented plan derives from the
/// prediction. Budgets alpha * e^i live in internal units where
/// opt(prediction) = e^k; dividing by `scale` converts to table units.
struct RandLaSchedule {
  bool competitive = false;       // lambda = 1: plain randomized plan
  bool prediction_first = false;  // lambda = 0: opt(prediction) before any phase
  int k = 0;
  LambdaDecomposition decomposition{};
  double scale = 1.0;
  double window_lo = 0.0;  // e^{k-q-r}, i.e. lambda * e^k
  double window_hi = 0.0;  // e^k
};

/// k = max(ceil(ln opt(prediction)), ceil(1 - ln lambda)) so that after
/// scaling opt(prediction) = e^k and lambda * e^k >= e.
inline RandLaSchedule make_rand_la_schedule(double opt_prediction, double lambda) {
  check_lambda(lambda);
  if (!(opt_prediction > 0.0)) throw std::invalid_argument("opt(prediction) must be positive");
  RandLaSchedule s;
  if (lambda == 1.0) {
    s.competitive = true;
    return s;
  }
  const int k_cost = static_cast<int>(std::ceil(std::log(opt_prediction)));
  if (lambda == 0.0) {
    s.prediction_first = true;
    s.k = std::max(k_cost, 0);
    s.window_lo = 0.0;
  } else {
    s.decomposition = decompose_lambda(lambda);
    s.k = std::max(k_cost, static_cast<int>(std::ceil(1.0 - std::log(lambda))));
    s.window_lo = std::exp(static_cast<double>(s.k) - static_cast<double>(s.decomposition.q) - s.decomposition.r);
  }
  s.window_hi = std::exp(static_cast<double>(s.k));
  s.scale = s.window_hi / opt_prediction;
  return s;
}

/// Randomized plan with a prediction: follow the randomized plan, except that
/// a phase whose budget falls in [lambda * opt(prediction), opt(prediction))
/// appends opt(prediction) instead (once; later such phases do nothing).
template <SkiTable Table>
class RandLearningAugmentedPlan {
 public:
  using segment_type = typename Table::segment_type;
  using days_type = typename Table::days_type;

  RandLearningAugmentedPlan(Table& table, days_type prediction, double lambda, double alpha)
      : table_(&table), prediction_(prediction), alpha_(alpha) {
    check_alpha(alpha);
    if (prediction < table.one_day()) throw std::invalid_argument("prediction must be at least one day");
    schedule_ = make_rand_la_schedule(table.opt_cost(prediction), lambda);
  }

  std::optional<segment_type> next() {
    if (exhausted_) return std::nullopt;
    if (schedule_.prediction_first && !appended_prediction_) return emit_prediction();
    while (true) {
      if (phase_ >= kMaxRandomizedPhases) throw std::overflow_error("randomized plan ran out of phases");
      const double budget = alpha_ * std::exp(static_cast<double>(phase_));
      ++phase_;
      if (!schedule_.competitive && budget >= schedule_.window_lo && budget < schedule_.window_hi) {
        if (appended_prediction_) continue;
        prediction_phase_ = phase_ - 1;
        return emit_prediction();
      }
      segment_type seg = table_->best_within_budget(budget / schedule_.scale);
      if (seg.empty()) continue;
      return finish(std::move(seg));
    }
  }

  const RandLaSchedule& schedule() const noexcept { return schedule_; }
  bool appended_prediction() const noexcept { return appended_prediction_; }
  /// Phase that appended opt(prediction), when it came from the window.
  std::optional<std::size_t> prediction_phase() const noexcept { return prediction_phase_; }
  std::size_t phase() const noexcept { return phase_; }

 private:
  segment_type emit_prediction() {
    appended_prediction_ = true;
    return finish(table_->opt_segment(prediction_));
  }

  segment_type finish(segment_type seg) {
    exhausted_ = detail::covers_forever(seg.total_days);
    return seg;
  }

  Table* table_;
  days_type prediction_;
  double alpha_;
  RandLaSchedule schedule_;
  std::size_t phase_ = 0;
  bool appended_prediction_ = false;
  std::optional<std::size_t> prediction_phase_;
  bool exhausted_ = false;
};

/// Baseline doubling on covered days: iteration 1 appends opt(1), later
/// iterations append b(2 * opt(days covered so far)).
template <SkiTable Table>
class AnandDoublingPlan {
 public:
  using segment_type = typename Table::segment_type;
  using days_type = typename Table::days_type;

  explicit AnandDoublingPlan(Table& table) : table_(&table), covered_(table.one_day()) {}

  std::optional<segment_type> next() {
    if (exhausted_) return std::nullopt;
    segment_type seg = iteration_ == 0 ? table_->opt_segment(table_->one_day())
                                       : table_->best_within_budget(2.0 * table_->opt_cost(covered_));
    covered_ = iteration_ == 0 ? seg.total_days : covered_ + seg.total_days;
    ++iteration_;
    exhausted_ = detail::covers_forever(seg.total_days);
    return seg;
  }

  const days_type& covered() const noexcept { return covered_; }

 private:
  Table* table_;
  days_type covered_;
  std::size_t iteration_ = 0;
  bool exhausted_ = false;
};

/// Any of the five plans behind one pull interface.
template <SkiTable Table>
class Plan {
 public:
  using segment_type = typename Table::segment_type;
  using variant_type = std::variant<DetCompetitivePlan<Table>, DetLearningAugmentedPlan<Table>,
                                    RandCompetitivePlan<Table>, RandLearningAugmentedPlan<Table>,
                                    AnandDoublingPlan<Table>>;

  template <typename P>
    requires(!std::same_as<std::remove_cvref_t<P>, Plan>)
  explicit Plan(P plan) : impl_(std::move(plan)) {}

  std::optional<segment_type> next() {
    return std::visit([](auto& p) { return p.next(); }, impl_);
  }

  const variant_type& impl() const noexcept { return impl_; }

 private:
  variant_type impl_;
};

/// Builds the plan for `params` over `table`. The table must outlive the plan.
template <SkiTable Table>
Plan<Table> make_plan(Table& table, const StrategyParams& params,
                      std::optional<typename Table::days_type> prediction = std::nullopt) {
  check_params_without_alpha(params);
  if (is_randomized(params.kind)) {
    if (!params.alpha) throw std::invalid_argument(std::string(to_string(params.kind)) + " needs alpha");
    check_alpha(*params.alpha);
  }
  if (uses_prediction(params.kind) && !prediction) throw std::invalid_argument("prediction days missing");
  switch (params.kind) {
    case StrategyKind::DetComp:
      return Plan<Table>(DetCompetitivePlan<Table>(table));
    case StrategyKind::DetLA:
      return Plan<Table>(DetLearningAugmentedPlan<Table>(table, *prediction, *params.lambda));
    case StrategyKind::RandComp:
      return Plan<Table>(RandCompetitivePlan<Table>(table, *params.alpha));
    case StrategyKind::RandLA:
      return Plan<Table>(RandLearningAugmentedPlan<Table>(table, *prediction, *params.lambda, *params.alpha));
    case StrategyKind::AnandDoubling:
      return Plan<Table>(AnandDoublingPlan<Table>(table));
  }
  throw std::invalid_argument("unknown strategy");
}

inline Plan<OptTable> make_plan(OptTable& table, const StrategyParams& params) {
  std::optional<Days> prediction;
  if (params.prediction) prediction = Days{*params.prediction};
  return make_plan<OptTable>(table, params, prediction);
}

/// Walks a plan's segments option by option in purchase order: within a
/// segment, longest duration first, ties by ascending option index.
template <SkiTable Table>
class PurchaseStream {
 public:
  using segment_type = typename Table::segment_type;

  PurchaseStream(Table& table, Plan<Table> plan) : table_(&table), plan_(std::move(plan)) {}

  /// Next option to buy, or nullopt once the plan is exhausted.
  std::optional<std::size_t> next() {
    while (cursor_ == order_.size()) {
      auto seg = plan_.next();
      if (!seg) return std::nullopt;
      load(*seg);
    }
    auto& p = order_[cursor_];
    const std::size_t option = p.option;
    if (--p.count == 0) ++cursor_;
    return option;
  }

  double fetched_cost() const noexcept { return fetched_cost_; }
  std::size_t segments_fetched() const noexcept { return segments_fetched_; }

 private:
  void load(const segment_type& seg) {
    ++segments_fetched_;
    fetched_cost_ += seg.total_cost;
    order_ = seg.purchases;
    std::stable_sort(order_.begin(), order_.end(), [this](const auto& a, const auto& b) {
      const auto da = table_->duration(a.option), db = table_->duration(b.option);
      if (da != db) return db < da;
      return a.option < b.option;
    });
    cursor_ = 0;
  }

  Table* table_;
  Plan<Table> plan_;
  std::vector<typename segment_type::Purchase> order_;
  std::size_t cursor_ = 0;
  double fetched_cost_ = 0.0;
  std::size_t segments_fetched_ = 0;
};

}  // namespace skirental
