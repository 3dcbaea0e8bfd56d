#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "disorder/likelihood.hpp"
#include "disorder/model.hpp"
#include "disorder/pair_matrix.hpp"
#include "disorder/posterior.hpp"

namespace disorder {

/// How the rule decides at the first admissible time n = d + 1.
enum class FirstDecisionRule {
  /// Compare h_tilde with the expected value of the best continuation,
  /// sum_y P(y | F_{d+1}) * max(h, s_K)(next state). A proper stopping time.
  kExpected,
  /// Compare h_tilde(Pi_{d+1}, B_{d+1}) with s_K(eta_{d+2}); needs X_{d+2},
  /// so the decision is made one step late and applied retroactively.
  kLiteral,
};

struct ValueIterConfig {
  std::size_t k_max = 10;
  double tol = 1e-8;
  std::size_t probe_points = 200;
  FirstDecisionRule first_decision = FirstDecisionRule::kExpected;
  /// Upper bound on expectation-tree nodes per evaluation.
  std::size_t node_budget = 50'000'000;

  /// Throws std::invalid_argument unless k_max >= 1 and tol > 0.
  void check() const;
};

struct StopDecision {
  bool stop = false;
  double stop_value = 0.0;      ///< payoff of stopping now
  double continue_value = 0.0;  ///< s_K at the current state
  std::size_t k_used = 0;
  bool converged = true;  ///< false when k_max was reached before |s_k - s_{k-1}| <= tol
};

/// Evaluates the continuation values s_k = T Q^k h on states
/// (window, gamma, delta) with a window of length d + 2.
///
/// Every s_k depends on (gamma, delta) only through u = (1 - gamma) o delta
/// and is positively homogeneous of degree one in u. The recursion therefore
/// runs on u directly: one step with next symbol y maps u to p o f0(x, y) o u
/// without renormalization, which is the gamma-fixed, delta-rescaled form of
/// the recursion. Results are memoized on the exact normalized u.
class ValueIterator {
 public:
  ValueIterator(ModelSpec spec, ValueIterConfig cfg);

  const ModelSpec& spec() const { return spec_; }
  const ValueIterConfig& config() const { return cfg_; }

  /// Closed form of s_0 = T h.
  double s0(const ObservationWindow& window, const PairMatrix& gamma,
            const PairMatrix& delta) const;

  double s_k(std::size_t k, const ObservationWindow& window, const PairMatrix& gamma,
             const PairMatrix& delta);

  /// s_0 .. s_k in a single pass over the expectation tree.
  std::vector<double> s_sequence(std::size_t k, const ObservationWindow& window,
                                 const PairMatrix& gamma, const PairMatrix& delta);

  /// Membership of the state in the stopping region: h >= s_K, where K is
  /// the first k with |s_k - s_{k-1}| <= tol (or k_max).
  StopDecision decide(const PosteriorState& state);

  /// Expected value of continuing optimally from a state at n >= d + 1:
  /// sum_y P(y | state) * max(h, s_K)(next state).
  StopDecision expected_continuation(const PosteriorState& state);

  std::size_t cache_size() const { return memo_.size(); }
  void clear_cache() { memo_.clear(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& key) const;
  };

  std::vector<double> pair_weights(const PairMatrix& gamma, const PairMatrix& delta) const;
  double payoff_u(const ObservationWindow& window, std::span<const double> u);
  const std::vector<double>& coefficients(const ObservationWindow& window);
  std::vector<double> sequence_u(std::size_t k, const ObservationWindow& window,
                                 const std::vector<double>& u);
  void check_budget(std::size_t k) const;
  void check_window(const ObservationWindow& window) const;
  std::pair<double, std::size_t> converged_value(const std::vector<double>& seq, bool& converged) const;

  ModelSpec spec_;
  ValueIterConfig cfg_;
  std::unordered_map<std::vector<std::uint64_t>, std::vector<double>, KeyHash> memo_;
  std::unordered_map<std::vector<std::uint64_t>, std::vector<double>, KeyHash> coefficient_cache_;
};

/// Free-function forms of the value-iteration quantities with default settings.
double s0(const ModelSpec& spec, const ObservationWindow& window, const PairMatrix& gamma,
          const PairMatrix& delta);
double s_k(const ModelSpec& spec, std::size_t k, const ObservationWindow& window,
           const PairMatrix& gamma, const PairMatrix& delta);

struct DecisionRecord {
  std::size_t n = 0;
  StopDecision decision;
};

struct RuleRun {
  std::size_t stop_time = 0;
  bool censored = false;  ///< the stream ended before the rule stopped
  bool convergence_warning = false;
  std::vector<DecisionRecord> trace;
  PosteriorState last_state;
};

/// The optimal rule: never stops before d + 1, decides at d + 1 per the
/// configured FirstDecisionRule and afterwards stops on first entry into
/// the stopping region. Decisions are cached by exact state, so one
/// instance should be confined to a single thread.
class OptimalRule {
 public:
  OptimalRule(ModelSpec spec, ValueIterConfig cfg);

  /// Runs over observations (x0, x_1, ...). A stream that ends before the
  /// rule stops is censored with stop_time = last index.
  RuleRun run(std::span<const Symbol> observations);

  ValueIterator& value_iterator() { return values_; }

 private:
  StopDecision cached_decide(const PosteriorState& state);
  StopDecision cached_first(const PosteriorState& state);

  ModelSpec spec_;
  ValueIterConfig cfg_;
  ValueIterator values_;
  std::unordered_map<std::string, StopDecision> decide_cache_;
  std::unordered_map<std::string, StopDecision> first_cache_;
};

/// Convenience wrapper for one stream with a fresh rule instance.
RuleRun rule_runner(const ModelSpec& spec, std::span<const Symbol> observations,
                    const ValueIterConfig& cfg);

}  // namespace disorder
