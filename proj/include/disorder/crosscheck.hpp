#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "disorder/model.hpp"
#include "disorder/oracle.hpp"
#include "disorder/posterior.hpp"

namespace disorder {

/// Outcome of one identity checked over many cases.
struct CheckResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::size_t cases = 0;

  bool passed() const { return cases > 0 && max_error <= tolerance; }
  /// "PASS name max_error=... tol=... cases=..."
  std::string line() const;
};

struct CrosscheckOptions {
  std::size_t horizon = 6;
  std::size_t lookahead = 4;          ///< largest k in the lookahead identity
  std::size_t trajectories = 1000;    ///< sampled streams for the s_k normalization check
  std::size_t trajectory_length = 20;
  std::size_t probe_states = 200;
  std::size_t value_k = 4;            ///< largest k for s_k checks
  std::uint64_t seed = 1;
};

// Table-level consistency.
CheckResult check_joint_mass(const JointTable& table);
CheckResult check_theta_marginal(const JointTable& table);
CheckResult check_path_probability(const JointTable& table);

// Filter against Bayes on the table, for every path up to the horizon.
CheckResult check_filter_posterior(const JointTable& table);
CheckResult check_lookahead(const JointTable& table, std::size_t max_k);
CheckResult check_lookback(const JointTable& table);
CheckResult check_predictive(const JointTable& table);
CheckResult check_multi_step(const JointTable& table);
CheckResult check_backshift(const JointTable& table);

// Payoff: expectation over the tree against the prior, and pathwise against the table.
CheckResult check_payoff_identity(const JointTable& table);
CheckResult check_payoff_conditional(const JointTable& table);

// Optimal stopping on the table.
CheckResult check_restriction_after_d(const JointTable& table);
CheckResult check_state_vs_path_induction(const JointTable& table);

// Value iteration on filter states.
CheckResult check_s0_closed_form(const ModelSpec& spec, const std::vector<PosteriorState>& states);
CheckResult check_normalization(const ModelSpec& spec,
                                const std::vector<std::vector<Symbol>>& streams, std::size_t k);
CheckResult check_monotone(const ModelSpec& spec, const std::vector<PosteriorState>& states,
                           std::size_t k);
CheckResult check_upper_bound(const ModelSpec& spec, const std::vector<PosteriorState>& states,
                              std::size_t k);

/// Filter states at times n >= d + 1 taken from sampled streams.
std::vector<PosteriorState> probe_states(const ModelSpec& spec, std::size_t count,
                                         std::size_t stream_length, std::uint64_t seed);
std::vector<std::vector<Symbol>> sample_streams(const ModelSpec& spec, std::size_t count,
                                                std::size_t length, std::uint64_t seed);

/// Every check above on one spec.
std::vector<CheckResult> run_crosscheck(const ModelSpec& spec, const CrosscheckOptions& options);

}  // namespace disorder
