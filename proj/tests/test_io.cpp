#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "invctl/io.hpp"
#include "test_support.hpp"

using namespace invctl;
using namespace invctl::testing;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST(ProblemJson, ParsesSpecFile) {
  const auto p = io::parse_problem(R"({"K": 5, "c_bar": 1,
      "h": {"breakpoints": [0], "slopes": [-3, 2]},
      "demand": {"1": 0.5, "2": 0.5}, "alpha": 0.9})");
  EXPECT_DOUBLE_EQ(p.K, 5.0);
  EXPECT_DOUBLE_EQ(p.alpha, 0.9);
  EXPECT_DOUBLE_EQ(one_step_cost(p, 0, 0), 4.5);
}

TEST(ProblemJson, RejectsMalformedInput) {
  EXPECT_THROW(io::parse_problem("{not json"), SpecError);
  EXPECT_THROW(io::parse_problem(R"({"K": 5})"), SpecError);
  EXPECT_THROW(io::parse_problem(R"({"K": 5, "c_bar": 1, "h": {"breakpoints": [0], "slopes": [2, -3]},
      "demand": {"1": 1.0}, "alpha": 0.5})"),
               SpecError);
  EXPECT_THROW(io::parse_problem(R"({"K": 5, "c_bar": 1, "h": {"breakpoints": [0], "slopes": [-1, 1]},
      "demand": {"x": 1.0}, "alpha": 0.5})"),
               SpecError);
  EXPECT_THROW(io::parse_problem(R"({"K": 5, "c_bar": 1, "h": {"breakpoints": [0], "slopes": [-1, 1]},
      "demand": {"1": 0.7}, "alpha": 0.5})"),
               SpecError);
}

TEST(ProblemJson, RoundTrip) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Problem<double> p(1.5 + trial, 0.5 + 0.1 * trial, random_cost(rng), random_pmf(rng, 3), 0.02 * trial);
    const auto q = io::problem_from_json(io::to_json(p));
    EXPECT_EQ(io::to_json(q), io::to_json(p));
    for (int x = -5; x <= 5; ++x) EXPECT_EQ(one_step_cost(q, x, 2), one_step_cost(p, x, 2));
  }
}

TEST(ReportJson, SchemaAndRoundTrip) {
  const auto hybrid = io::to_json(classify(instance_b(0.8), Horizon::finite(5)));
  EXPECT_EQ(hybrid["structure"]["HYBRID"]["order_steps_end"], 3);
  EXPECT_EQ(hybrid["N_alpha"], 2);
  const auto never = io::to_json(classify(instance_b(0.3), Horizon::infinite()));
  EXPECT_EQ(never["N_alpha"], "inf");
  EXPECT_EQ(never["structure"], "NEVER_ORDER");
  EXPECT_EQ(never["horizon"], "inf");
  EXPECT_EQ(io::to_json(classify(instance_b(1.2), Horizon::finite(3)))["infinite_structure"], "UNDEFINED");

  std::mt19937 rng(9);
  std::uniform_real_distribution<double> al(0.0, 1.4);
  for (int trial = 0; trial < 100; ++trial) {
    const Problem<double> p(2.0, 0.5 + 0.05 * trial, random_cost(rng), random_pmf(rng), al(rng));
    const auto horizon = (trial % 4 == 0 && p.alpha < 1) ? Horizon::infinite() : Horizon::finite(trial % 9);
    const auto j = io::to_json(classify(p, horizon));
    EXPECT_EQ(io::to_json(io::report_from_json(j)), j);
  }
}

TEST(PolicyJson, RoundTrip) {
  const Policy pol(Horizon::finite(3), {Thresholds{-1, 1}, ActionTable{-2, {3, 1, 0}}, NeverOrder{}});
  const auto j = io::to_json(pol);
  EXPECT_EQ(j["stages"][0]["type"], "threshold");
  EXPECT_EQ(j["stages"][0]["s"], -1);
  EXPECT_EQ(j["stages"][2]["type"], "never_order");
  EXPECT_EQ(io::policy_from_json(j), pol);
  const auto st = Policy::stationary(Thresholds{0, 3});
  EXPECT_EQ(io::to_json(st)["horizon"], "inf");
  EXPECT_EQ(io::policy_from_json(io::to_json(st)), st);
  EXPECT_THROW(io::policy_from_json(io::json::parse(R"({"horizon": 1, "stages": [{"type": "x"}]})")), SpecError);
  EXPECT_THROW(io::policy_from_json(io::json::parse(R"({"horizon": 2, "stages": [{"type": "never_order"}]})")),
               SpecError);
  EXPECT_THROW(
      io::policy_from_json(io::json::parse(R"({"horizon": 1, "stages": [{"type": "threshold", "s": 3, "S": 1}]})")),
      SpecError);
}

TEST(SimResultJson, RoundTrip) {
  SimResult r;
  r.mean_cost = 1.0 / 3.0;
  r.std_error = 0.1;
  r.n_paths = 3;
  r.seed = 18446744073709551615ULL;
  r.path_costs = {0.1, 0.2, 0.7};
  r.truncation_bound = 1e-9;
  const auto back = io::sim_result_from_json(io::json::parse(io::to_json(r).dump()));
  EXPECT_EQ(back.mean_cost, r.mean_cost);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.path_costs, r.path_costs);
  EXPECT_EQ(back.truncation_bound, r.truncation_bound);
}

TEST(ValuesCsv, InstanceAOneStep) {
  const auto vt = solve_finite(instance_a(), 1, Interval{-2, 2});
  std::ostringstream out;
  io::write_values_csv(out, vt);
  const auto rows = lines(out.str());
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0], "t,x,v,G,action,s_t,S_t");
  EXPECT_EQ(rows[3], "0,0,0,4.5,,,");
  EXPECT_EQ(rows[8], "1,0,4.5,12.15,0,-1,1");
  EXPECT_EQ(rows[6], "1,-2,9.5,18.400000000000002,3,-1,1");
}

TEST(ValuesCsv, ZeroHorizonAndNeverOrderStages) {
  std::ostringstream zero;
  io::write_values_csv(zero, solve_finite(instance_a(), 0, Interval{-1, 1}));
  const auto z = lines(zero.str());
  ASSERT_EQ(z.size(), 4u);
  for (std::size_t i = 1; i < z.size(); ++i) EXPECT_EQ(z[i].rfind("0,", 0), 0u);

  std::ostringstream never;
  io::write_values_csv(never, solve_finite(instance_b(0.3), 2, Interval{0, 0}));
  const auto n = lines(never.str());
  ASSERT_EQ(n.size(), 4u);
  EXPECT_EQ(n[2].substr(n[2].size() - 4), ",0,,");
}

TEST(ValuesJson, MirrorsCsv) {
  const auto vt = solve_finite(instance_a(), 2, Interval{-1, 1});
  const auto j = io::values_to_json(vt);
  ASSERT_EQ(j["rows"].size(), 9u);
  EXPECT_TRUE(j["rows"][0]["s_t"].is_null());
  EXPECT_EQ(j["rows"][4]["s_t"], -1);
  EXPECT_EQ(j["rows"][4]["t"], 1);
}

TEST(SweepCsv, RoundTrip) {
  const auto rows = regime_sweep(instance_b(0.0), {0.5, 1.0, 2.0}, 0.05, 0.95, 10);
  std::ostringstream out;
  io::write_sweep_csv(out, rows);
  std::istringstream in(out.str());
  const auto back = io::read_sweep_csv(in);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].alpha, rows[i].alpha);
    EXPECT_EQ(back[i].ratio, rows[i].ratio);
    EXPECT_EQ(back[i].n_alpha, rows[i].n_alpha);
    EXPECT_EQ(back[i].finite, rows[i].finite);
    EXPECT_EQ(back[i].order_steps_end, rows[i].order_steps_end);
    EXPECT_EQ(back[i].infinite, rows[i].infinite);
  }
}
