#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "disorder/model.hpp"
#include "disorder/stopping.hpp"

namespace disorder {

struct Trajectory {
  LatentState latent;
  std::vector<Symbol> observations;  ///< x0, X_1, ..., X_H
  std::uint64_t seed = 0;
};

/// Draws beta ~ b, theta from its conditional law given beta, then X_1..X_H
/// from the pre-change kernel while n < theta and the post-change kernel
/// from n = theta on. Latent and observation draws use separate substreams
/// of `seed`.
Trajectory sample_trajectory(const ModelSpec& spec, std::size_t horizon, std::uint64_t seed);

/// Seed of trajectory `index` under `base_seed`.
std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index);

/// Inverse-CDF draw from non-negative weights summing to one; u in [0, 1).
std::size_t sample_index(std::span<const double> weights, double u);

enum class RuleKind { kOptimal, kOptimalLiteral, kFixed, kThreshold };

struct RuleSpec {
  std::string name;
  RuleKind kind = RuleKind::kOptimal;
  double threshold = 0.5;  ///< for kThreshold
};

/// Accepts "optimal", "optimal-literal", "fixed", "threshold" and
/// "threshold:<level>". Throws std::invalid_argument otherwise.
RuleSpec parse_rule(std::string_view name);
std::vector<RuleSpec> parse_rule_list(std::string_view comma_separated);

struct RuleOutcome {
  std::size_t stop_time = 0;
  bool censored = false;
  bool convergence_warning = false;
};

/// Runs one rule over observation streams. Holds per-rule caches, so an
/// instance belongs to a single thread.
class RuleEvaluator {
 public:
  RuleEvaluator(const ModelSpec& spec, RuleSpec rule, const ValueIterConfig& cfg);

  const RuleSpec& rule() const { return rule_; }
  RuleOutcome run(std::span<const Symbol> observations);

 private:
  ModelSpec spec_;
  RuleSpec rule_;
  OptimalRule optimal_;
};

enum class CensoringPolicy {
  kForcedStop,  ///< a censored run stops at the horizon and is scored there
  kFailure,     ///< a censored run scores as a miss
};

struct ExperimentConfig {
  std::size_t n = 10'000;
  std::size_t horizon = 20;
  std::uint64_t base_seed = 1;
  ValueIterConfig value_iteration;
  CensoringPolicy censoring = CensoringPolicy::kForcedStop;
  std::size_t threads = 0;  ///< 0 picks the hardware concurrency (results do not depend on it)
};

struct RuleSummary {
  std::string rule;
  double estimate = 0.0;   ///< fraction of runs with |theta - tau| <= d
  double std_error = 0.0;  ///< sqrt(estimate (1 - estimate) / N)
  double mean_tau = 0.0;
  double censoring_rate = 0.0;
  std::size_t successes = 0;
  std::size_t censored = 0;
  std::size_t convergence_warnings = 0;

  friend bool operator==(const RuleSummary&, const RuleSummary&) = default;
};

struct ExperimentReport {
  std::size_t n = 0;
  std::size_t horizon = 0;
  std::uint64_t base_seed = 0;
  std::string config_digest;
  std::vector<RuleSummary> rules;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Evaluates every rule on the same N trajectories.
ExperimentReport monte_carlo_eval(const ModelSpec& spec, const std::vector<RuleSpec>& rules,
                                  const ExperimentConfig& cfg);

/// FNV-1a 64 digest of the spec and every setting that affects results.
std::string config_digest(const ModelSpec& spec, const std::vector<RuleSpec>& rules,
                          const ExperimentConfig& cfg);

/// "rule,metric,value" rows; floats with 17 significant digits.
std::string report_csv(const ExperimentReport& report);
ExperimentReport parse_report_csv(std::string_view text);
std::string report_json(const ExperimentReport& report);

/// "index,seed,theta,beta1,beta2,observations" rows.
std::string trajectories_csv(const std::vector<Trajectory>& trajectories);

}  // namespace disorder
