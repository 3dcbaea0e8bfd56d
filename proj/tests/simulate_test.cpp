#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>

#include "disorder/likelihood.hpp"
#include "disorder/oracle.hpp"
#include "disorder/rng.hpp"
#include "disorder/simulate.hpp"
#include "test_models.hpp"

namespace disorder {
namespace {

double prior_window(const ModelSpec& s, std::size_t lo, std::size_t hi) {
  double total = 0.0;
  for (std::size_t t = lo; t <= hi; ++t) total += theta_prior_pmf(s, t);
  return total;
}

TEST(Rng, ReferenceSequence) {
  // First outputs of SplitMix64 seeded with 0 in the reference implementation.
  SplitMix64 g(0);
  EXPECT_EQ(g.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(g.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(g.next(), 0x06c45d188009454fULL);
  EXPECT_NE(derive_seed(1, 0, 1), derive_seed(1, 0, 2));
  EXPECT_NE(derive_seed(1, 0, 1), derive_seed(1, 1, 1));
  EXPECT_EQ(derive_seed(7, 3, 1), derive_seed(7, 3, 1));
}

TEST(SampleIndex, InverseCdf) {
  const std::vector<double> w{0.2, 0.0, 0.5, 0.3};
  EXPECT_EQ(sample_index(w, 0.0), 0u);
  EXPECT_EQ(sample_index(w, 0.19), 0u);
  EXPECT_EQ(sample_index(w, 0.2), 2u);
  EXPECT_EQ(sample_index(w, 0.75), 3u);
  EXPECT_EQ(sample_index(w, 0.9999999999), 3u);
}

TEST(Sample, CertainChangeAtOne) {
  ModelSpec s = testing::m3(1);
  s.pi = PairMatrix(2, 2, 1.0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Trajectory t = sample_trajectory(s, 5, seed);
    EXPECT_EQ(t.latent.theta, 1u);
    EXPECT_EQ(t.observations.size(), 6u);
    EXPECT_EQ(t.observations.front(), s.x0);
    EXPECT_EQ(t.seed, seed);
  }
}

TEST(Sample, ThetaHistogramMatchesPrior) {
  const ModelSpec s = testing::m3(0);
  const std::size_t draws = 100'000, cells = 15;
  std::vector<double> counts(cells + 1, 0.0);
  for (std::size_t k = 0; k < draws; ++k) {
    const std::size_t theta = sample_trajectory(s, 1, trajectory_seed(5, k)).latent.theta;
    counts[std::min(theta, cells + 1) - 1] += 1.0;
  }
  double stat = 0.0;
  for (std::size_t c = 0; c <= cells; ++c) {
    const double p = c < cells ? theta_prior_pmf(s, c + 1) : 1.0 - prior_window(s, 1, cells);
    const double expected = p * double(draws);
    stat += (counts[c] - expected) * (counts[c] - expected) / expected;
  }
  const boost::math::chi_squared dist{static_cast<double>(cells)};
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, stat)), 0.001) << stat;
}

TEST(Sample, PathFrequenciesMatchPathLaw) {
  const ModelSpec s = testing::m3(0);
  const std::size_t draws = 1'000'000;
  std::map<std::vector<Symbol>, double> counts;
  for (std::size_t k = 0; k < draws; ++k) counts[sample_trajectory(s, 3, trajectory_seed(9, k)).observations] += 1;
  for (const auto& path : testing::all_paths(s, 3)) {
    const double p = path_probability(s, path);
    const double se = std::sqrt(p * (1 - p) / double(draws));
    EXPECT_NEAR(counts[path] / double(draws), p, 4 * se);
  }
}

TEST(Rules, Parse) {
  EXPECT_EQ(parse_rule("optimal").kind, RuleKind::kOptimal);
  EXPECT_EQ(parse_rule("optimal-literal").kind, RuleKind::kOptimalLiteral);
  EXPECT_EQ(parse_rule("fixed").kind, RuleKind::kFixed);
  const RuleSpec t = parse_rule("threshold:0.8");
  EXPECT_EQ(t.kind, RuleKind::kThreshold);
  EXPECT_EQ(t.threshold, 0.8);
  EXPECT_EQ(parse_rule("threshold").threshold, 0.5);
  EXPECT_THROW(parse_rule("threshold:2"), std::invalid_argument);
  EXPECT_THROW(parse_rule("cusum"), std::invalid_argument);
  EXPECT_EQ(parse_rule_list("optimal,fixed").size(), 2u);
  EXPECT_THROW(parse_rule_list("optimal,"), std::invalid_argument);
}

ExperimentConfig small_config(std::size_t n, std::size_t threads) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.horizon = 12;
  cfg.base_seed = 42;
  cfg.threads = threads;
  cfg.value_iteration.k_max = 6;
  return cfg;
}

TEST(MonteCarlo, FixedRuleMatchesPrior) {
  for (std::size_t d : {0, 1}) {
    const ModelSpec s = testing::m3(d);
    const ExperimentReport r = monte_carlo_eval(s, {parse_rule("fixed")}, small_config(40'000, 0));
    const double exact = prior_window(s, 1, 2 * d + 1);
    EXPECT_NEAR(r.rules[0].estimate, exact, 3 * std::sqrt(exact * (1 - exact) / 40'000.0));
    EXPECT_EQ(r.rules[0].mean_tau, double(d + 1));
    EXPECT_EQ(r.rules[0].censored, 0u);
  }
}

TEST(MonteCarlo, BitIdenticalAcrossRunsAndThreadCounts) {
  const ModelSpec s = testing::m2(1);
  const auto rules = parse_rule_list("optimal,fixed,threshold:0.6");
  const ExperimentReport one = monte_carlo_eval(s, rules, small_config(3000, 1));
  const ExperimentReport again = monte_carlo_eval(s, rules, small_config(3000, 1));
  const ExperimentReport many = monte_carlo_eval(s, rules, small_config(3000, 5));
  EXPECT_EQ(one, again);
  EXPECT_EQ(one, many);
  EXPECT_EQ(report_csv(one), report_csv(many));
  EXPECT_EQ(report_json(one), report_json(many));
}

TEST(MonteCarlo, AddingRulesDoesNotPerturbOthers) {
  const ModelSpec s = testing::m3(0);
  const ExperimentReport alone = monte_carlo_eval(s, parse_rule_list("fixed"), small_config(2000, 2));
  const ExperimentReport both = monte_carlo_eval(s, parse_rule_list("optimal,fixed"), small_config(2000, 2));
  EXPECT_EQ(alone.rules[0], both.rules[1]);
  EXPECT_NE(alone.config_digest, both.config_digest);
}

TEST(MonteCarlo, CsvRoundTrip) {
  const ExperimentReport r = monte_carlo_eval(testing::m4(1), parse_rule_list("optimal,threshold:0.4"),
                                              small_config(500, 2));
  const std::string csv = report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rule,metric,value");
  EXPECT_EQ(parse_report_csv(csv), r);
  EXPECT_THROW(parse_report_csv("nope\n"), std::invalid_argument);
}

TEST(MonteCarlo, CensoringPolicies) {
  const ModelSpec s = testing::m2(0);
  ExperimentConfig cfg = small_config(4000, 2);
  cfg.horizon = 2;
  const auto rules = parse_rule_list("threshold:0.99");
  const ExperimentReport forced = monte_carlo_eval(s, rules, cfg);
  cfg.censoring = CensoringPolicy::kFailure;
  const ExperimentReport failure = monte_carlo_eval(s, rules, cfg);
  EXPECT_GT(forced.rules[0].censored, 0u);
  EXPECT_EQ(forced.rules[0].censored, failure.rules[0].censored);
  EXPECT_GE(forced.rules[0].successes, failure.rules[0].successes);
  EXPECT_NEAR(forced.rules[0].censoring_rate, double(forced.rules[0].censored) / 4000.0, 1e-15);
}

TEST(MonteCarlo, OptimalDominatesHeuristicsOnM2) {
  const ModelSpec s = testing::m2(0);
  const std::size_t n = 20'000;
  const ExperimentReport r = monte_carlo_eval(s, parse_rule_list("optimal,fixed,threshold"), small_config(n, 0));
  const RuleSummary& best = r.rules[0];
  for (std::size_t k = 1; k < r.rules.size(); ++k) {
    const RuleSummary& other = r.rules[k];
    const double pooled = std::sqrt(best.std_error * best.std_error + other.std_error * other.std_error);
    EXPECT_GE(best.estimate, other.estimate - 2 * pooled) << other.rule;
  }
  for (const RuleSummary& rule : r.rules) {
    EXPECT_NEAR(rule.std_error, std::sqrt(rule.estimate * (1 - rule.estimate) / double(n)), 1e-15);
  }
}

TEST(MonteCarlo, OptimalMatchesOracleOptimum) {
  const ModelSpec s = testing::m2(0);
  const JointTable table = JointTable::build(s, 8);
  const double optimum = exact_optimal_rule(table, true).value();
  ExperimentConfig cfg = small_config(20'000, 0);
  cfg.horizon = 8;
  cfg.value_iteration.k_max = 8;
  const ExperimentReport r = monte_carlo_eval(s, parse_rule_list("optimal"), cfg);
  EXPECT_NEAR(r.rules[0].estimate, optimum, 2 * r.rules[0].std_error + 1e-12);
}

TEST(Trajectories, CsvLayout) {
  const ModelSpec s = testing::m1();
  const std::string csv = trajectories_csv({sample_trajectory(s, 3, 11), sample_trajectory(s, 3, 12)});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,seed,theta,beta1,beta2,observations");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

}  // namespace
}  // namespace disorder
