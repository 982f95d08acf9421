#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "skirental/format.hpp"
#include "skirental/harness.hpp"
#include "skirental/instance.hpp"
#include "skirental/parallel.hpp"
#include "skirental/random.hpp"
#include "skirental/strategies.hpp"

namespace skirental {

struct ExperimentConfig {
  std::size_t n_options = 15;
  std::uint64_t d_max = 50;
  std::uint64_t t_max_multiplier = 10;
  std::vector<double> lambdas{0.1, 0.3, 0.5, 0.7};
  std::vector<double> sigmas{0.0};
  std::size_t trials = 1000;
  std::vector<StrategyKind> strategies{StrategyKind::DetLA, StrategyKind::RandLA, StrategyKind::AnandDoubling};
  std::uint64_t master_seed = 0;
  std::size_t jobs = 1;
};

inline void validate(const ExperimentConfig& c) {
  if (c.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (c.n_options < 1 || c.n_options > c.d_max) throw std::invalid_argument("need 1 <= n_options <= d_max");
  if (c.t_max_multiplier < 1) throw std::invalid_argument("t_max_multiplier must be positive");
  if (c.lambdas.empty() || c.sigmas.empty() || c.strategies.empty())
    throw std::invalid_argument("lambdas, sigmas and strategies must be nonempty");
  for (double l : c.lambdas) check_lambda(l);
  for (double s : c.sigmas)
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("sigmas must be nonnegative");
  for (auto k : c.strategies)
    if (k != StrategyKind::DetLA && k != StrategyKind::RandLA && k != StrategyKind::AnandDoubling)
      throw std::invalid_argument("experiments compare det-la, rand-la and anand only");
}

/// Label used in experiment output; the doubling baseline is named so that
/// it is not mistaken for a learning-augmented method.
inline std::string experiment_label(StrategyKind k) {
  if (k == StrategyKind::AnandDoubling) return "anand-doubling-baseline";
  return std::string(to_string(k));
}

/// Costs c_i = r_i d_i, made nondecreasing: whenever r_i d_i < c_{i-1},
/// r_i..r_n are scaled by c_{i-1} / (r_i d_i) and raised by 1e-4. Updates r.
inline std::vector<double> repaired_costs(const std::vector<std::uint64_t>& d, std::vector<double>& r) {
  if (d.size() != r.size() || d.empty()) throw std::invalid_argument("need one rate per duration");
  const std::size_t n = d.size();
  std::vector<double> c(n);
  c[0] = r[0] * static_cast<double>(d[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double raw = r[i] * static_cast<double>(d[i]);
    if (raw < c[i - 1]) {
      const double factor = c[i - 1] / raw;
      for (std::size_t k = i; k < n; ++k) r[k] = r[k] * factor + 1e-4;
    }
    c[i] = r[i] * static_cast<double>(d[i]);
  }
  return c;
}

/// Random instance: n distinct durations from 1..d_max in increasing order,
/// costs r_i d_i with sorted r_i in (0, 1), repaired so costs never drop.
inline RentalInstance gen_instance(CounterStream& rng, std::size_t n = 15, std::uint64_t d_max = 50) {
  if (n < 1 || n > d_max) throw std::invalid_argument("need 1 <= n <= d_max");
  std::vector<std::uint64_t> pool(d_max);
  for (std::uint64_t i = 0; i < d_max; ++i) pool[i] = i + 1;
  for (std::size_t i = 0; i < n; ++i) std::swap(pool[i], pool[i + rng.below(d_max - i)]);
  std::vector<std::uint64_t> d(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(d.begin(), d.end());

  std::vector<double> r(n);
  for (auto& x : r) x = rng.open_unit();
  std::sort(r.begin(), r.end());

  const auto c = repaired_costs(d, r);
  RentalInstance inst;
  for (std::size_t i = 0; i < n; ++i) inst.options.push_back({Days{d[i]}, c[i]});
  return inst;
}

/// Round half up.
inline double round_half_up(double x) { return std::floor(x + 0.5); }

/// Prediction max(round(T + eta), 1) for a given noise value.
inline std::uint64_t noisy_prediction(std::uint64_t T, double eta) {
  const double p = round_half_up(static_cast<double>(T) + eta);
  return p < 1.0 ? 1 : static_cast<std::uint64_t>(p);
}

/// T uniform on 1..t_max and its noisy prediction; sigma = 0 skips the
/// normal draw entirely.
inline std::pair<std::uint64_t, std::uint64_t> gen_T_and_prediction(CounterStream& rng, double sigma,
                                                                    std::uint64_t t_max = 500) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  const std::uint64_t T = 1 + rng.below(t_max);
  const double eta = sigma == 0.0 ? 0.0 : sigma * rng.standard_normal();
  return {T, noisy_prediction(T, eta)};
}

struct TrialRecord {
  double lambda = 0.0;
  double sigma = 0.0;
  StrategyKind strategy = StrategyKind::DetLA;
  std::size_t trial = 0;
  std::uint64_t T = 0;
  std::uint64_t That = 0;
  double alg_cost = 0.0;
  double opt_cost = 0.0;
  double ratio = 0.0;
};

/// One trial of a grid cell. Its stream is keyed by (master seed, trial,
/// lambda index, sigma index) and is consumed in a fixed order: instance,
/// T, noise, alpha.
inline std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, std::size_t lambda_index,
                                          std::size_t sigma_index, std::size_t trial) {
  CounterStream rng(cfg.master_seed, static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(lambda_index),
                    static_cast<std::uint32_t>(sigma_index));
  const double lambda = cfg.lambdas[lambda_index], sigma = cfg.sigmas[sigma_index];
  const RentalInstance inst = gen_instance(rng, cfg.n_options, cfg.d_max);
  const auto [T, That] = gen_T_and_prediction(rng, sigma, cfg.t_max_multiplier * cfg.d_max);
  const double alpha = sample_alpha(rng.unit());

  Simulator sim(inst);
  std::vector<TrialRecord> out;
  for (auto kind : cfg.strategies) {
    StrategyParams p{kind, That, lambda, alpha};
    const auto trace = sim.run(p, T);
    out.push_back({lambda, sigma, kind, trial, T, That, trace.total_cost, trace.opt_cost, trace.ratio});
  }
  return out;
}

/// Records ordered by lambda, sigma, trial, then strategy as configured.
/// The result does not depend on cfg.jobs.
inline std::vector<TrialRecord> run_grid(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t cells = cfg.lambdas.size() * cfg.sigmas.size();
  std::vector<std::vector<TrialRecord>> per(cells * cfg.trials);
  parallel_for(per.size(), cfg.jobs, [&](std::size_t idx, std::size_t) {
    const std::size_t trial = idx % cfg.trials, cell = idx / cfg.trials;
    per[idx] = run_trial(cfg, cell / cfg.sigmas.size(), cell % cfg.sigmas.size(), trial);
  });
  std::vector<TrialRecord> records;
  records.reserve(per.size() * cfg.strategies.size());
  for (auto& v : per) records.insert(records.end(), v.begin(), v.end());
  return records;
}

struct SummaryRow {
  double lambda = 0.0;
  double sigma = 0.0;
  StrategyKind strategy = StrategyKind::DetLA;
  double mean_ratio = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
};

/// Mean ratio and standard error (sample sd / sqrt(n)) per cell, in order of
/// first appearance.
inline std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no records to summarize");
  using Key = std::tuple<double, double, StrategyKind>;
  std::vector<Key> order;
  std::map<Key, std::vector<double>> cells;
  for (const auto& r : records) {
    Key k{r.lambda, r.sigma, r.strategy};
    auto [it, fresh] = cells.try_emplace(k);
    if (fresh) order.push_back(k);
    it->second.push_back(r.ratio);
  }
  std::vector<SummaryRow> out;
  for (const auto& k : order) {
    const auto& xs = cells[k];
    CompensatedSum sum;
    for (double x : xs) sum.add(x);
    const double n = static_cast<double>(xs.size());
    const double mean = sum.value() / n;
    CompensatedSum sq;
    for (double x : xs) sq.add((x - mean) * (x - mean));
    const double se = xs.size() > 1 ? std::sqrt(sq.value() / (n - 1.0) / n) : 0.0;
    out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), mean, se, xs.size()});
  }
  return out;
}

inline void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records, const ExperimentConfig& cfg) {
  out << "# charging=lazy master_seed=" << cfg.master_seed << " trials=" << cfg.trials
      << " n_options=" << cfg.n_options << " d_max=" << cfg.d_max << "\n";
  out << "lambda,sigma,strategy,trial,T,That,alg_cost,opt_cost,ratio\n";
  for (const auto& r : records) {
    out << format_number(r.lambda) << ',' << format_number(r.sigma) << ',' << experiment_label(r.strategy) << ','
        << r.trial << ',' << r.T << ',' << r.That << ',' << format_number(r.alg_cost) << ','
        << format_number(r.opt_cost) << ',' << format_number(r.ratio) << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "lambda,sigma,strategy,mean_ratio,stderr,trials\n";
  for (const auto& r : rows) {
    out << format_number(r.lambda) << ',' << format_number(r.sigma) << ',' << experiment_label(r.strategy) << ','
        << format_number(r.mean_ratio) << ',' << format_number(r.standard_error) << ',' << r.trials << '\n';
  }
}

}  // namespace skirental
