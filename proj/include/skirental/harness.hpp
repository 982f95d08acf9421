#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "skirental/opt_table.hpp"
#include "skirental/parallel.hpp"
#include "skirental/random.hpp"
#include "skirental/strategies.hpp"

namespace skirental {

struct PurchaseEvent {
  std::uint64_t day = 0;
  std::size_t option = 0;
  double cost = 0.0;
};

/// One online run against a hidden horizon. `fetched_cost` is the full cost
/// of every segment the plan appended (the eager charge); `total_cost` is
/// what the lazy purchaser actually paid.
struct RunTrace {
  std::uint64_t horizon = 0;
  std::vector<PurchaseEvent> events;
  double total_cost = 0.0;
  double opt_cost = 0.0;
  double ratio = 0.0;
  double fetched_cost = 0.0;
  std::size_t segments_fetched = 0;
};

struct SweepReport {
  std::vector<double> alg_costs;  // index T - 1
  std::vector<double> opt_costs;
  std::vector<double> ratios;
  double worst_ratio = 0.0;
  std::uint64_t argmax_T = 0;
};

struct AlphaInterval {
  double lo = 1.0;
  double hi = std::numbers::e;
  double weight = 1.0;  // ln hi - ln lo, the probability under density 1/alpha
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

// Stream id reserved for alpha draws derived from a user seed.
inline constexpr std::uint32_t kAlphaStream = 0x616c7068u;

/// Alpha used for a run seeded with `seed`; the same as the first
/// Monte-Carlo sample drawn with that seed.
inline double alpha_from_seed(std::uint64_t seed) {
  CounterStream stream(seed, kAlphaStream);
  return sample_alpha(stream.unit());
}

/// Drives plans over one instance. Plans see the instance normalized to
/// opt(1) = 1; purchases are charged at the caller's original costs, and
/// opt(T) is measured on the original instance.
class Simulator {
 public:
  explicit Simulator(const RentalInstance& instance)
      : instance_(validate(instance)), original_(instance_), normalized_(normalize(instance_)) {}

  const RentalInstance& instance() const noexcept { return instance_; }
  OptTable& plan_table() noexcept { return normalized_; }
  double opt_cost(std::uint64_t t) { return original_.opt_cost(t); }

  /// Lazy purchase: whenever a day is uncovered, buy the next option of the
  /// current segment, fetching the next segment when it runs out.
  RunTrace run(const StrategyParams& params, std::uint64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("horizon must be at least one day");
    check_params(params);
    RunTrace trace;
    trace.horizon = horizon;
    PurchaseStream<OptTable> stream(normalized_, make_plan(normalized_, params));
    Days covered{0};
    const Days target{horizon};
    while (covered < target) {
      const auto option = stream.next();
      if (!option) throw std::logic_error("plan exhausted before covering the horizon");
      const auto& opt = instance_.options[*option];
      trace.events.push_back({covered.count() + 1, *option, opt.cost});
      trace.total_cost += opt.cost;
      covered += opt.duration;
    }
    trace.fetched_cost = stream.fetched_cost() / normalized_.instance().scale * instance_.scale;
    trace.segments_fetched = stream.segments_fetched();
    trace.opt_cost = opt_cost(horizon);
    trace.ratio = trace.total_cost / trace.opt_cost;
    return trace;
  }

  /// Lazy cost for every horizon 1..t_max from a single run: the plan never
  /// sees T, so the run for T is a prefix of the run for t_max.
  std::vector<double> prefix_costs(const StrategyParams& params, std::uint64_t t_max) {
    const RunTrace trace = run(params, t_max);
    std::vector<double> out(t_max, 0.0);
    double paid = 0.0;
    std::size_t e = 0;
    for (std::uint64_t t = 1; t <= t_max; ++t) {
      while (e < trace.events.size() && trace.events[e].day <= t) paid += trace.events[e++].cost;
      out[t - 1] = paid;
    }
    return out;
  }

  SweepReport sweep(const StrategyParams& params, std::uint64_t t_max) {
    if (t_max < 1) throw std::invalid_argument("t_max must be at least one");
    SweepReport report;
    report.alg_costs = prefix_costs(params, t_max);
    report.opt_costs.resize(t_max);
    report.ratios.resize(t_max);
    for (std::uint64_t t = 1; t <= t_max; ++t) {
      report.opt_costs[t - 1] = opt_cost(t);
      report.ratios[t - 1] = report.alg_costs[t - 1] / report.opt_costs[t - 1];
      if (report.ratios[t - 1] > report.worst_ratio) {
        report.worst_ratio = report.ratios[t - 1];
        report.argmax_T = t;
      }
    }
    return report;
  }

  /// Partition of [1, e) on which a randomized plan's trajectory up to t_max
  /// days is constant. Breakpoints are the alphas at which some phase budget
  /// crosses an opt value (or a prediction-window endpoint).
  std::vector<AlphaInterval> expectation_intervals(const StrategyParams& params, std::uint64_t t_max) {
    if (!is_randomized(params.kind)) throw std::invalid_argument("expectation needs a randomized strategy");
    check_params_without_alpha(params);
    RandLaSchedule schedule;
    schedule.competitive = true;
    double reach = normalized_.opt_cost(t_max);
    if (params.kind == StrategyKind::RandLA) {
      const double opt_pred = normalized_.opt_cost(*params.prediction);
      schedule = make_rand_la_schedule(opt_pred, *params.lambda);
      reach = std::max(reach, opt_pred);
    }
    // No phase beyond the first one whose budget reaches `reach` is fetched.
    const double limit = std::numbers::e * reach * (1.0 + 1e-9);

    std::vector<double> cuts{1.0, std::numbers::e};
    auto add_internal = [&](double budget) {
      if (!(budget > 0.0)) return;
      const int top = static_cast<int>(std::floor(std::log(budget)));
      for (int i = std::max(top - 1, 0); i <= top + 1; ++i) {
        const double a = budget / std::exp(static_cast<double>(i));
        if (a > 1.0 && a < std::numbers::e) cuts.push_back(a);
      }
    };
    for (double v : normalized_.distinct_costs_below(limit)) add_internal(v * schedule.scale);
    if (!schedule.competitive) {
      add_internal(schedule.window_lo);
      add_internal(schedule.window_hi);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> unique;
    for (double c : cuts)
      if (unique.empty() || c - unique.back() > 1e-15) unique.push_back(c);
    unique.back() = std::numbers::e;

    std::vector<AlphaInterval> out;
    for (std::size_t i = 0; i + 1 < unique.size(); ++i) {
      const double lo = unique[i], hi = unique[i + 1];
      const double w = std::log(hi) - std::log(lo);
      if (w > 0.0) out.push_back({lo, hi, w});
    }
    return out;
  }

  /// Exact expected lazy cost for every horizon 1..t_max under alpha with
  /// density 1/alpha: each constant piece contributes cost * log-width.
  /// Pieces are evaluated on `jobs` workers and summed in order.
  std::vector<double> exact_expected_costs(const StrategyParams& params, std::uint64_t t_max, std::size_t jobs = 1) {
    const auto intervals = expectation_intervals(params, t_max);
    std::vector<std::vector<double>> pieces(intervals.size());
    for_each_alpha(
        params, intervals.size(), [&](std::size_t i) { return std::sqrt(intervals[i].lo * intervals[i].hi); },
        t_max, jobs, [&](std::size_t i, std::vector<double> costs) { pieces[i] = std::move(costs); });
    std::vector<CompensatedSum> sums(t_max);
    for (std::size_t i = 0; i < intervals.size(); ++i)
      for (std::uint64_t t = 0; t < t_max; ++t) sums[t].add(pieces[i][t] * intervals[i].weight);
    std::vector<double> out(t_max);
    for (std::uint64_t t = 0; t < t_max; ++t) out[t] = sums[t].value();
    return out;
  }

  /// Seeded Monte-Carlo estimates at the given horizons; sample s uses the
  /// s-th uniform of the seed's alpha stream, whatever the worker count.
  std::vector<MonteCarloEstimate> monte_carlo_expected_costs(const StrategyParams& params,
                                                             const std::vector<std::uint64_t>& horizons,
                                                             std::size_t samples, std::uint64_t seed,
                                                             std::size_t jobs = 1) {
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    if (horizons.empty()) return {};
    for (auto h : horizons)
      if (h < 1) throw std::invalid_argument("horizon must be at least one day");
    const std::uint64_t t_max = *std::max_element(horizons.begin(), horizons.end());
    CounterStream stream(seed, kAlphaStream);
    std::vector<double> alphas(samples);
    for (auto& a : alphas) a = sample_alpha(stream.unit());
    std::vector<double> values(samples * horizons.size());
    for_each_alpha(
        params, samples, [&](std::size_t s) { return alphas[s]; }, t_max, jobs,
        [&](std::size_t s, std::vector<double> costs) {
          for (std::size_t h = 0; h < horizons.size(); ++h) values[s * horizons.size() + h] = costs[horizons[h] - 1];
        });
    std::vector<double> mean(horizons.size(), 0.0), m2(horizons.size(), 0.0);
    for (std::size_t s = 0; s < samples; ++s) {
      for (std::size_t h = 0; h < horizons.size(); ++h) {
        const double x = values[s * horizons.size() + h];
        const double delta = x - mean[h];
        mean[h] += delta / static_cast<double>(s + 1);
        m2[h] += delta * (x - mean[h]);
      }
    }
    std::vector<MonteCarloEstimate> out(horizons.size());
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      out[h].mean = mean[h];
      out[h].samples = samples;
      out[h].standard_error =
          samples > 1 ? std::sqrt(m2[h] / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
    }
    return out;
  }

 private:
  // Runs prefix_costs for `count` alphas; each worker uses its own copy of
  // the tables.
  template <typename AlphaAt, typename Sink>
  void for_each_alpha(const StrategyParams& params, std::size_t count, AlphaAt alpha_at, std::uint64_t t_max,
                      std::size_t jobs, Sink sink) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    std::vector<Simulator> workers;
    if (jobs > 1) workers.assign(jobs, *this);
    parallel_for(count, jobs, [&](std::size_t i, std::size_t w) {
      StrategyParams p = params;
      p.alpha = alpha_at(i);
      sink(i, (jobs > 1 ? workers[w] : *this).prefix_costs(p, t_max));
    });
  }

  RentalInstance instance_;
  OptTable original_;
  OptTable normalized_;
};

inline RunTrace run_once(const RentalInstance& instance, const StrategyParams& params, std::uint64_t horizon) {
  return Simulator(instance).run(params, horizon);
}

inline SweepReport sweep(const RentalInstance& instance, const StrategyParams& params, std::uint64_t t_max) {
  return Simulator(instance).sweep(params, t_max);
}

inline double exact_expected_cost(const RentalInstance& instance, const StrategyParams& params, std::uint64_t horizon,
                                  std::size_t jobs = 1) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least one day");
  return Simulator(instance).exact_expected_costs(params, horizon, jobs).back();
}

inline MonteCarloEstimate monte_carlo_expected_cost(const RentalInstance& instance, const StrategyParams& params,
                                                    std::uint64_t horizon, std::size_t samples, std::uint64_t seed,
                                                    std::size_t jobs = 1) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least one day");
  return Simulator(instance).monte_carlo_expected_costs(params, {horizon}, samples, seed, jobs).front();
}

}  // namespace skirental
