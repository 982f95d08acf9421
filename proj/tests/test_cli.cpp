#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "skirental/cli.hpp"

using namespace skirental;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "skirental");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const std::string kRentOrBuy = std::string(SKIRENTAL_DATA_DIR) + "/rent_or_buy.txt";
const std::string kThree = std::string(SKIRENTAL_DATA_DIR) + "/three_options.txt";

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST(ParseList, Forms) {
  EXPECT_EQ(cli::parse_list("0.1,0.3"), (std::vector<double>{0.1, 0.3}));
  EXPECT_EQ(cli::parse_list("1..3"), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(cli::parse_list("0..50:25"), (std::vector<double>{0, 25, 50}));
  EXPECT_THROW(cli::parse_list("a,b"), std::invalid_argument);
  EXPECT_THROW(cli::parse_list(""), std::invalid_argument);
}

TEST(Cli, Opt) {
  const auto r = run({"opt", "--instance", kRentOrBuy, "--days", "5"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_TRUE(contains(r.out, "opt(5) = 4\n"));
}

TEST(Cli, SimulateDeterministic) {
  const auto r = run({"simulate", "--instance", kRentOrBuy, "--days", "5", "--strategy", "det"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_TRUE(contains(r.out, "alg_cost = 8\n"));
  EXPECT_TRUE(contains(r.out, "ratio = 2\n"));
  const auto csv = run({"simulate", "--instance", kRentOrBuy, "--days", "5", "--strategy", "det", "--csv"});
  EXPECT_EQ(csv.out, "T,alg_cost,opt_cost,ratio\n5,8,4,2\n");
}

TEST(Cli, RandomizedNeedsAlphaOrSeed) {
  const auto r = run({"simulate", "--instance", kRentOrBuy, "--days", "5", "--strategy", "rand"});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_TRUE(contains(r.err, "--seed or --alpha"));
  const auto ok = run({"simulate", "--instance", kRentOrBuy, "--days", "5", "--strategy", "rand", "--alpha", "1.5"});
  EXPECT_EQ(ok.code, cli::kOk);
  EXPECT_TRUE(contains(ok.out, "alg_cost = 5\n"));
}

TEST(Cli, Sweep) {
  const auto r = run({"sweep", "--instance", kRentOrBuy, "--tmax", "20", "--strategy", "det"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_TRUE(contains(r.out, "worst ratio = 2 at T = 5"));
  const auto three = run({"sweep", "--instance", kThree, "--tmax", "200", "--strategy", "det", "--jobs", "2"});
  EXPECT_EQ(three.code, cli::kOk);
}

TEST(Cli, Expect) {
  const auto r = run({"expect", "--instance", kRentOrBuy, "--days", "2", "--strategy", "rand"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_TRUE(contains(r.out, "E[alg_cost] = 2.92055845832"));
  EXPECT_EQ(run({"expect", "--instance", kRentOrBuy, "--days", "2", "--strategy", "rand", "--mc", "100"}).code,
            cli::kUsage);
  EXPECT_EQ(run({"expect", "--instance", kRentOrBuy, "--days", "2", "--strategy", "det"}).code, cli::kUsage);
}

TEST(Cli, ButtonReduce) {
  const auto r = run({"button-reduce", "--prices", "1,2,2,3", "--target", "3", "--strategy", "rand", "--seeds", "100"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_TRUE(contains(r.out, "C = 18, n = 3"));
  EXPECT_TRUE(contains(r.out, "ledger bound violations = 0"));
  EXPECT_EQ(run({"button-reduce", "--prices", "1,2,2,3", "--target", "3", "--strategy", "rand"}).code, cli::kUsage);
  EXPECT_EQ(run({"button-reduce", "--prices", "3,2", "--target", "1", "--strategy", "det"}).code, cli::kUsage);
  EXPECT_EQ(run({"button-reduce", "--prices", "1,2", "--target", "2", "--strategy", "det-la", "--lambda", "0.5"}).code,
            cli::kUsage);
}

TEST(Cli, LpExportToFile) {
  const auto path = std::filesystem::temp_directory_path() / "skirental_cli_test.lp";
  const auto r = run({"lb-lp", "--prices", "1,2", "--out", path.string()});
  EXPECT_EQ(r.code, cli::kOk);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), export_lp(build_primal_lp({1.0, 2.0})));
  std::filesystem::remove(path);
}

TEST(Cli, LowerBounds) {
  const auto d = run({"lb-dual", "--eps", "1", "--delta", "20", "--c-over-delta", "0.3", "--m", "200", "--check"});
  EXPECT_EQ(d.code, cli::kOk);
  EXPECT_TRUE(contains(d.out, "feasible"));
  EXPECT_EQ(run({"lb-dual", "--eps", "1", "--delta", "20", "--c-over-delta", "0.05", "--m", "200"}).code, cli::kUsage);
  const auto s = run({"lb-detseq", "--gamma", "3.9", "--count", "100"});
  EXPECT_EQ(s.code, cli::kOk);
  EXPECT_TRUE(contains(s.out, "first nonpositive at i = 18"));
  EXPECT_EQ(run({"lb-tradeoff", "--lambda", "0.5"}).out, "4.5\n");
  EXPECT_EQ(run({"lb-tradeoff", "--lambda", "1"}).code, cli::kUsage);
}

TEST(Cli, Claims) {
  const auto r = run({"claims", "--grid", "50"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_TRUE(contains(r.out, "all claims hold"));
  EXPECT_EQ(run({"claims", "--grid", "3"}).code, cli::kUsage);
}

TEST(Cli, ExperimentIsReproducible) {
  const std::vector<std::string> args{"experiment", "--trials", "5", "--lambdas", "0.1,0.5", "--sigmas", "0..20:20",
                                      "--seed", "9"};
  const auto a = run(args);
  auto more = args;
  more.insert(more.end(), {"--jobs", "3"});
  const auto b = run(more);
  EXPECT_EQ(a.code, cli::kOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(contains(a.out, "# charging=lazy master_seed=9"));
  EXPECT_TRUE(contains(a.out, "lambda,sigma,strategy,mean_ratio,stderr,trials\n"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kUsage);
  EXPECT_EQ(run({"opt", "--instance", "/nonexistent", "--days", "3"}).code, cli::kUsage);
  EXPECT_EQ(run({"opt", "--instance", kRentOrBuy, "--days", "0"}).code, cli::kUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}
