#pragma once

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "skirental/button.hpp"
#include "skirental/claims.hpp"
#include "skirental/det_bound.hpp"
#include "skirental/dual.hpp"
#include "skirental/experiments.hpp"
#include "skirental/format.hpp"
#include "skirental/harness.hpp"
#include "skirental/instance.hpp"
#include "skirental/lp.hpp"
#include "skirental/strategies.hpp"

namespace skirental::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kCheckFailed = 2;

/// Comma-separated numbers; an item "a..b" expands to a, a+1, ..., b and
/// "a..b:s" uses step s.
inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  auto number = [](const std::string& s) {
    const auto v = parse_number(s);
    if (!v || !std::isfinite(*v)) throw std::invalid_argument("not a number: '" + s + "'");
    return *v;
  };
  for (std::string item; std::getline(ss, item, ',');) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(number(item));
      continue;
    }
    std::string hi_text = item.substr(dots + 2);
    double step = 1.0;
    if (const auto colon = hi_text.find(':'); colon != std::string::npos) {
      step = number(hi_text.substr(colon + 1));
      hi_text.erase(colon);
    }
    const double lo = number(item.substr(0, dots)), hi = number(hi_text);
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad range '" + item + "'");
    const auto n = static_cast<std::uint64_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::uint64_t k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

inline RentalInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read instance file '" + path + "'");
  return parse_instance(in);
}

namespace detail {

struct StrategyFlags {
  std::string strategy = "det";
  std::uint64_t pred = 0;
  double lambda = 0.0;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  CLI::Option* pred_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void add_to(CLI::App* app, bool with_alpha) {
    app->add_option("--strategy", strategy, "det, det-la, rand, rand-la or anand")->required();
    pred_opt = app->add_option("--pred", pred, "predicted number of skiing days");
    lambda_opt = app->add_option("--lambda", lambda, "trust parameter in [0, 1]");
    if (with_alpha) {
      alpha_opt = app->add_option("--alpha", alpha, "budget multiplier in [1, e)");
      seed_opt = app->add_option("--seed", seed, "seed for drawing alpha");
    }
  }

  /// Params without alpha; alpha is resolved by the caller.
  StrategyParams params() const {
    StrategyParams p;
    p.kind = parse_strategy(strategy);
    if (pred_opt->count()) p.prediction = pred;
    if (lambda_opt->count()) p.lambda = lambda;
    check_params_without_alpha(p);
    return p;
  }

  /// Randomized strategies need --alpha or --seed; nothing is drawn from
  /// ambient entropy.
  StrategyParams params_with_alpha() const {
    StrategyParams p = params();
    if (!is_randomized(p.kind)) return p;
    if (alpha_opt->count()) {
      p.alpha = alpha;
    } else if (seed_opt->count()) {
      p.alpha = alpha_from_seed(seed);
    } else {
      throw std::invalid_argument(std::string(to_string(p.kind)) + " needs --seed or --alpha");
    }
    check_alpha(*p.alpha);
    return p;
  }
};

inline std::string option_label(const RentalInstance& inst, std::size_t i) {
  const auto& o = inst.options[i];
  return "option " + std::to_string(i + 1) + " (d=" + o.duration.to_string() + ", c=" + format_number(o.cost) + ")";
}

inline void csv_row(std::ostream& out, std::uint64_t T, double alg, double opt) {
  out << T << ',' << format_number(alg) << ',' << format_number(opt) << ',' << format_number(alg / opt) << '\n';
}

inline constexpr const char* kCsvHeader = "T,alg_cost,opt_cost,ratio\n";

// Output goes to --out when given, otherwise to the command's stream.
class Output {
 public:
  Output(std::ostream& fallback, const std::string& path) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

}  // namespace detail

/// Runs one command line. Returns 0 on success, 1 on usage or validation
/// errors, 2 when a certificate or bound check fails.
inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-option ski rental: strategies, simulation and lower-bound certificates", "skirental"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  int status = kOk;
  std::string instance_path, out_path;
  std::uint64_t days = 1, tmax = 1, mc = 0;
  std::size_t jobs = 1;
  bool csv = false;

  // opt
  auto* opt_cmd = app.add_subcommand("opt", "minimum cost to cover a number of days");
  opt_cmd->add_option("--instance", instance_path, "instance file")->required();
  opt_cmd->add_option("--days", days, "number of days")->required()->check(CLI::PositiveNumber);

  // simulate
  detail::StrategyFlags sim_flags;
  auto* sim_cmd = app.add_subcommand("simulate", "run a strategy against a fixed number of days");
  sim_cmd->add_option("--instance", instance_path, "instance file")->required();
  sim_cmd->add_option("--days", days, "true number of skiing days")->required()->check(CLI::PositiveNumber);
  sim_flags.add_to(sim_cmd, true);
  sim_cmd->add_flag("--csv", csv, "print a CSV row instead of a summary");

  // sweep
  detail::StrategyFlags sweep_flags;
  auto* sweep_cmd = app.add_subcommand("sweep", "ratios for every horizon 1..tmax");
  sweep_cmd->add_option("--instance", instance_path, "instance file")->required();
  sweep_cmd->add_option("--tmax", tmax, "largest horizon")->required()->check(CLI::PositiveNumber);
  sweep_flags.add_to(sweep_cmd, true);
  sweep_cmd->add_flag("--csv", csv, "print CSV rows for every horizon");
  sweep_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  // expect
  detail::StrategyFlags expect_flags;
  std::uint64_t expect_seed = 0;
  auto* expect_cmd = app.add_subcommand("expect", "expected cost of a randomized strategy");
  expect_cmd->add_option("--instance", instance_path, "instance file")->required();
  expect_cmd->add_option("--days", days, "true number of skiing days")->required()->check(CLI::PositiveNumber);
  expect_flags.add_to(expect_cmd, false);
  auto* mc_opt = expect_cmd->add_option("--mc", mc, "also estimate by Monte Carlo with this many samples")
                     ->check(CLI::PositiveNumber);
  auto* expect_seed_opt = expect_cmd->add_option("--seed", expect_seed, "seed for the Monte-Carlo samples");
  expect_cmd->add_flag("--csv", csv, "print a CSV row with the exact expectation");
  expect_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  // button-reduce
  std::string prices_text;
  std::size_t target = 1, button_pred = 1, seeds = 1;
  double eps = 0.5;
  detail::StrategyFlags button_flags;
  auto* button_cmd = app.add_subcommand("button-reduce", "drive a ski strategy as a button strategy");
  button_cmd->add_option("--prices", prices_text, "nondecreasing integer prices, comma separated")->required();
  button_cmd->add_option("--target", target, "first target button J")->required();
  auto* button_pred_opt = button_cmd->add_option("--pred", button_pred, "predicted first target");
  button_cmd->add_option("--eps", eps, "epsilon in (0, 1)");
  button_cmd->add_option("--strategy", button_flags.strategy, "ski strategy")->required();
  button_flags.lambda_opt = button_cmd->add_option("--lambda", button_flags.lambda, "trust parameter in [0, 1]");
  auto* seeds_opt = button_cmd->add_option("--seeds", seeds, "run seeds 0..N-1")->check(CLI::PositiveNumber);
  button_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  // lb-lp
  auto* lp_cmd = app.add_subcommand("lb-lp", "export the button LP");
  lp_cmd->add_option("--prices", prices_text, "nondecreasing prices, comma separated")->required();
  lp_cmd->add_option("--out", out_path, "write to this file instead of stdout");

  // lb-dual
  RandLBParams lb;
  bool check = false;
  std::string mode_text = "auto";
  auto* dual_cmd = app.add_subcommand("lb-dual", "analytic dual certificate for the randomized lower bound");
  dual_cmd->add_option("--eps", lb.epsilon, "epsilon in (0, e - 1)")->required();
  dual_cmd->add_option("--delta", lb.delta, "granularity")->required();
  dual_cmd->add_option("--c-over-delta", lb.c_over_delta, "c / delta")->required();
  dual_cmd->add_option("--m", lb.m, "number of buttons")->required();
  dual_cmd->add_flag("--check", check, "verify every dual row");
  dual_cmd->add_option("--mode", mode_text, "pair-row check: auto, pairwise or envelope")
      ->check(CLI::IsMember({"auto", "pairwise", "envelope"}));

  // lb-detseq
  double gamma = 4.0;
  std::size_t count = 10;
  auto* detseq_cmd = app.add_subcommand("lb-detseq", "the a_i sequence for a target ratio");
  detseq_cmd->add_option("--gamma", gamma, "target ratio")->required();
  detseq_cmd->add_option("--count", count, "number of terms")->required()->check(CLI::PositiveNumber);

  // lb-tradeoff
  double tradeoff_lambda = 0.5;
  auto* tradeoff_cmd = app.add_subcommand("lb-tradeoff", "deterministic lower bound for a trust level");
  tradeoff_cmd->add_option("--lambda", tradeoff_lambda, "lambda in (0, 1)")->required();

  // claims
  std::size_t grid = 10000;
  auto* claims_cmd = app.add_subcommand("claims", "check the analysis inequalities on a grid");
  claims_cmd->add_option("--grid", grid, "points per claim")->required();

  // experiment
  ExperimentConfig ecfg;
  std::string lambdas_text = "0.1,0.3,0.5,0.7", sigmas_text = "0", summary_path;
  auto* exp_cmd = app.add_subcommand("experiment", "random-instance experiment grid");
  exp_cmd->add_option("--trials", ecfg.trials, "trials per cell")->required()->check(CLI::PositiveNumber);
  exp_cmd->add_option("--lambdas", lambdas_text, "lambda values, e.g. 0.1,0.3");
  exp_cmd->add_option("--sigmas", sigmas_text, "noise levels, e.g. 0,10 or 0..50:10");
  exp_cmd->add_option("--seed", ecfg.master_seed, "master seed")->required();
  exp_cmd->add_option("--out", out_path, "per-trial CSV (stdout when omitted)");
  exp_cmd->add_option("--summary", summary_path, "summary CSV (stdout when omitted)");
  exp_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*opt_cmd) {
      OptTable table(load_instance(instance_path));
      const auto seg = table.opt_segment(days);
      out << "opt(" << days << ") = " << format_number(table.opt_cost(days)) << "\n";
      out << "solution:";
      for (const auto& p : seg.purchases) out << " " << p.count << " x " << detail::option_label(table.instance(), p.option);
      out << "\n";
    } else if (*sim_cmd) {
      const auto inst = load_instance(instance_path);
      const auto p = sim_flags.params_with_alpha();
      const auto trace = run_once(inst, p, days);
      if (trace.total_cost > trace.fetched_cost * (1.0 + 1e-12)) status = kCheckFailed;
      if (csv) {
        out << detail::kCsvHeader;
        detail::csv_row(out, days, trace.total_cost, trace.opt_cost);
      } else {
        out << "strategy " << to_string(p.kind);
        if (p.alpha) out << ", alpha = " << format_number(*p.alpha);
        out << "\n";
        for (const auto& e : trace.events)
          out << "day " << e.day << ": buy " << detail::option_label(inst, e.option) << "\n";
        out << "alg_cost = " << format_number(trace.total_cost) << "\n";
        out << "opt_cost = " << format_number(trace.opt_cost) << "\n";
        out << "ratio = " << format_number(trace.ratio) << "\n";
      }
    } else if (*sweep_cmd) {
      const auto p = sweep_flags.params_with_alpha();
      const auto report = sweep(load_instance(instance_path), p, tmax);
      if (csv) {
        out << detail::kCsvHeader;
        for (std::uint64_t t = 1; t <= tmax; ++t) detail::csv_row(out, t, report.alg_costs[t - 1], report.opt_costs[t - 1]);
      } else {
        out << "strategy " << to_string(p.kind) << ", T = 1.." << tmax << "\n";
        out << "worst ratio = " << format_number(report.worst_ratio) << " at T = " << report.argmax_T << "\n";
      }
    } else if (*expect_cmd) {
      const auto p = expect_flags.params();
      if (!is_randomized(p.kind)) throw std::invalid_argument("expect needs a randomized strategy");
      if (mc_opt->count() && !expect_seed_opt->count()) throw std::invalid_argument("--mc needs --seed");
      Simulator sim(load_instance(instance_path));
      const double exact = sim.exact_expected_costs(p, days, jobs).back();
      const double opt = sim.opt_cost(days);
      if (csv) {
        out << detail::kCsvHeader;
        detail::csv_row(out, days, exact, opt);
      } else {
        out << "E[alg_cost] = " << format_number(exact) << "\n";
        out << "opt_cost = " << format_number(opt) << "\n";
        out << "ratio = " << format_number(exact / opt) << "\n";
      }
      if (mc_opt->count()) {
        const auto est = sim.monte_carlo_expected_costs(p, {days}, mc, expect_seed, jobs).front();
        std::ostream& where = csv ? err : out;
        where << "monte carlo: mean = " << format_number(est.mean) << ", stderr = " << format_number(est.standard_error)
              << ", samples = " << est.samples << "\n";
      }
    } else if (*button_cmd) {
      ButtonInstance b;
      b.prices = integer_prices(parse_list(prices_text));
      b.first_target = target;
      if (button_pred_opt->count()) b.prediction = button_pred;
      validate(b);
      StrategyParams p;
      p.kind = parse_strategy(button_flags.strategy);
      if (button_flags.lambda_opt->count()) p.lambda = button_flags.lambda;
      if (uses_prediction(p.kind) && !p.lambda) throw std::invalid_argument("--lambda is required");
      if (is_randomized(p.kind) && !seeds_opt->count()) throw std::invalid_argument("randomized strategies need --seeds");
      const auto cfg = make_reduction_config(b.prices, eps, p);
      const auto mc_result = run_reduction_monte_carlo(b, p, cfg, seeds, jobs);
      const double rho = std::isfinite(cfg.rho) ? cfg.rho : cfg.chi;
      const double bound = (rho + cfg.epsilon) * static_cast<double>(b.prices[b.first_target - 1]);
      out << "C = " << cfg.C << ", n = " << cfg.n << "\n";
      out << "runs = " << mc_result.runs << "\n";
      out << "mean price = " << format_number(mc_result.mean_price) << ", stderr = "
          << format_number(mc_result.standard_error) << "\n";
      out << "bound (rho + eps) * b_J = " << format_number(bound) << "\n";
      out << "forced = " << mc_result.forced << ", surcharge always b_m = " << (mc_result.surcharge_always_b_m ? "yes" : "no")
          << "\n";
      out << "ledger bound violations = " << mc_result.bound_violations
          << ", non-increasing click traces = " << mc_result.non_increasing << "\n";
      if (mc_result.bound_violations > 0 || !mc_result.surcharge_always_b_m || mc_result.mean_price > bound)
        status = kCheckFailed;
    } else if (*lp_cmd) {
      const auto text = export_lp(LPModel(parse_list(prices_text)));
      detail::Output sink(out, out_path);
      sink.get() << text;
    } else if (*dual_cmd) {
      const auto d = analytic_dual(lb);
      const auto prices = lb_instance_prices(lb);
      const auto mode = mode_text == "pairwise" ? PairCheckMode::Pairwise
                        : mode_text == "envelope" ? PairCheckMode::Envelope
                                                  : PairCheckMode::Auto;
      const auto nd = normalize_dual(prices, d, mode);
      out << "w = " << format_number(static_cast<double>(d.w)) << "\n";
      out << "sum b_j v_j = " << format_number(static_cast<double>(nd.sum_bv)) << "\n";
      out << "normalized value = " << format_number(nd.value) << "\n";
      out << "closed-form lower estimate = " << format_number(analytic_value_bound(lb)) << "\n";
      if (check) {
        const auto report = check_dual_feasibility(prices, d, mode);
        out << "mode = " << (report.mode == PairCheckMode::Pairwise ? "pairwise" : "envelope") << "\n";
        for (const auto& f : report.families)
          out << f.name << ": rows = " << f.rows << ", max violation = "
              << format_number(static_cast<double>(f.max_violation)) << "\n";
        out << "normalized rows: max violation = " << format_number(static_cast<double>(nd.recheck.max_violation))
            << ", normalization error = " << format_number(static_cast<double>(nd.normalization_error)) << "\n";
        const bool ok = report.feasible && nd.feasible;
        out << (ok ? "feasible" : "INFEASIBLE") << "\n";
        if (!ok) status = kCheckFailed;
      }
    } else if (*detseq_cmd) {
      const auto r = det_lb_sequence(gamma, count);
      for (std::size_t i = 0; i < r.sequence.size(); ++i)
        out << "a_" << (i + 1) << " = " << format_number(r.sequence[i]) << "\n";
      if (r.first_nonpositive) out << "first nonpositive at i = " << *r.first_nonpositive << "\n";
      else out << "no nonpositive term in " << count << " terms\n";
      if (r.limit) out << "limit = " << format_number(*r.limit) << "\n";
    } else if (*tradeoff_cmd) {
      out << format_number(det_tradeoff_bound(tradeoff_lambda)) << "\n";
    } else if (*claims_cmd) {
      const auto r = verify_analysis_claims(grid);
      for (const auto& c : r.claims) {
        out << c.name << ": points = " << c.points << ", max violation = " << format_number(c.max_violation)
            << ", min slack = " << format_number(c.worst_slack) << " at " << c.worst_at;
        if (c.equality_residual) out << ", equality residual = " << format_number(*c.equality_residual);
        out << "\n";
      }
      out << (r.passed() ? "all claims hold" : "VIOLATED") << "\n";
      if (!r.passed()) status = kCheckFailed;
    } else if (*exp_cmd) {
      ecfg.lambdas = parse_list(lambdas_text);
      ecfg.sigmas = parse_list(sigmas_text);
      ecfg.jobs = jobs;
      const auto records = run_grid(ecfg);
      {
        detail::Output sink(out, out_path);
        write_records_csv(sink.get(), records, ecfg);
      }
      detail::Output sink(out, summary_path);
      write_summary_csv(sink.get(), summarize(records));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return status;
}

}  // namespace skirental::cli
