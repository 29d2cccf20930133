#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cocreate/errors.hpp"
#include "cocreate/oracle.hpp"

using namespace cocreate;

namespace {

// Expected normalized reward of a policy that pulls uniformly at random:
// the liked arm pays with probability acc, the others with 1 - acc.
double uniform_expectation(double acc, std::size_t k) {
  const double kd = static_cast<double>(k);
  return ((1.0 / kd) * acc + ((kd - 1.0) / kd) * (1.0 - acc)) / acc;
}

OracleConfig small_config() {
  OracleConfig c;
  c.repetitions = 200;
  c.master_seed = 11;
  return c;
}

}  // namespace

TEST(OracleFeedback, RewardFrequencies) {
  Rng rng = make_rng(1);
  const int n = 40000;
  int liked = 0, other = 0;
  for (int i = 0; i < n; ++i) {
    liked += oracle_feedback(0, 0, 0.7, rng);
    other += oracle_feedback(0, 2, 0.7, rng);
  }
  EXPECT_NEAR(static_cast<double>(liked) / n, 0.7, 0.01);
  EXPECT_NEAR(static_cast<double>(other) / n, 0.3, 0.01);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(oracle_feedback(1, 1, 1.0, rng), 1);
    EXPECT_EQ(oracle_feedback(1, 0, 1.0, rng), 0);
  }
}

TEST(OraclePolicy, NamesRoundTrip) {
  for (const auto& p : OracleConfig::default_policies()) EXPECT_EQ(OraclePolicy::parse(p.name()), p);
  EXPECT_EQ(OraclePolicy::parse("epsilon_greedy:0.1").name(), "epsilon_greedy:0.1");
  EXPECT_THROW(OraclePolicy::parse("greedy"), InvalidArgument);
}

TEST(OracleConfig, Validates) {
  OracleConfig c;
  EXPECT_NO_THROW(c.validate());
  c.accuracies = {0.4};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = OracleConfig{};
  c.steps = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = OracleConfig{};
  c.liked_arm = 3;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = OracleConfig{};
  c.policies.clear();
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(RunTrial, ReferencePoliciesAreExactAtFullAccuracy) {
  const OracleConfig c;
  for (std::uint64_t t = 0; t < 50; ++t) {
    EXPECT_EQ(run_trial(OraclePolicy::always_liked(), c, 1.0, t).normalized, 1.0);
    EXPECT_EQ(run_trial(OraclePolicy::always_disliked(), c, 1.0, t).normalized, 0.0);
  }
}

TEST(RunTrial, NormalizesBySteps) {
  OracleConfig c;
  const auto r = run_trial(OraclePolicy::learning(Policy::thompson()), c, 0.8, 3);
  ASSERT_EQ(r.rewards.size(), c.steps);
  double sum = 0;
  for (double x : r.rewards) sum += x;
  EXPECT_DOUBLE_EQ(r.normalized, sum / (0.8 * 10));
}

TEST(RunTrial, TrialIndexFixesTheOutcome) {
  const OracleConfig c;
  const auto p = OraclePolicy::learning(Policy::epsilon_greedy(0.2));
  EXPECT_EQ(run_trial(p, c, 0.7, 9).rewards, run_trial(p, c, 0.7, 9).rewards);
}

TEST(Experiment, UniformRandomMatchesClosedForm) {
  OracleConfig c;
  c.repetitions = 2000;
  c.policies = {OraclePolicy::learning(Policy::uniform_random())};
  const auto table = run_experiment(c);
  for (double acc : c.accuracies) {
    const auto* row = table.find("uniform_random", acc);
    ASSERT_NE(row, nullptr);
    EXPECT_NEAR(row->mean_normalized, uniform_expectation(acc, 3), 0.03) << acc;
  }
}

TEST(Experiment, IndependentOfThreadCount) {
  OracleConfig c = small_config();
  c.threads = 1;
  const std::string one = to_csv(run_experiment(c));
  c.threads = 4;
  EXPECT_EQ(to_csv(run_experiment(c)), one);
}

TEST(Experiment, RowsAreSortedAndComplete) {
  const auto table = run_experiment(small_config());
  ASSERT_EQ(table.rows.size(), 6u * 5u);
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& a = table.rows[i - 1];
    const auto& b = table.rows[i];
    EXPECT_TRUE(a.policy < b.policy || (a.policy == b.policy && a.accuracy < b.accuracy));
  }
  for (const auto& r : table.rows) {
    EXPECT_EQ(r.repetitions, 200u);
    EXPECT_EQ(r.steps, 10u);
    EXPECT_TRUE(r.std_normalized);
  }
}

TEST(Experiment, LearnersBeatRandomWhenFeedbackIsPerfect) {
  OracleConfig c;
  c.repetitions = 1000;
  c.accuracies = {1.0};
  const auto table = run_experiment(c);
  const double random = table.find("uniform_random", 1.0)->mean_normalized;
  EXPECT_GE(table.find("thompson", 1.0)->mean_normalized, random + 0.05);
  EXPECT_GE(table.find("ucb1", 1.0)->mean_normalized, random + 0.05);
}

TEST(Output, CsvShape) {
  OracleConfig c = small_config();
  c.accuracies = {0.6, 1.0};
  c.repetitions = 1;
  c.policies = {OraclePolicy::always_liked()};
  const std::string csv = to_csv(run_experiment(c));
  std::istringstream in(csv);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, "policy,accuracy,repetitions,steps,mean_normalized,std_normalized,seed");
  EXPECT_EQ(row2, "always_liked,1,1,10,1.000000,,11");
  EXPECT_EQ(csv.back(), '\n');
}

TEST(Output, PlotJsonHasOneSeriesPerPolicy) {
  const auto j = to_plot_json(run_experiment(small_config()));
  ASSERT_EQ(j.at("series").size(), 6u);
  for (const auto& s : j.at("series")) {
    EXPECT_EQ(s.at("points").size(), 5u);
    EXPECT_EQ(s.at("points")[0].size(), 2u);
  }
  EXPECT_EQ(j.at("steps"), 10);
}
