#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "disorder/model.hpp"
#include "disorder/pair_matrix.hpp"

namespace disorder {

/// Exact joint law of (theta, beta, X_0..X_n) for every path with n <= H,
/// stored conditionally on beta: cell(path, pair, bucket) is
/// P(theta in bucket, X_1..X_n = path | beta = pair, X_0 = x0).
///
/// Buckets 1..theta_cap hold single values of theta; the last bucket holds
/// theta > theta_cap with its closed-form geometric mass. theta_cap >= H,
/// so every observation up to H is pre-change in the tail bucket.
class JointTable {
 public:
  static constexpr std::size_t kDefaultCellBudget = 10'000'000;

  /// theta_cap = 0 selects the default H + d.
  static JointTable build(const ModelSpec& spec, std::size_t horizon, std::size_t theta_cap = 0,
                          std::size_t cell_budget = kDefaultCellBudget);

  const ModelSpec& spec() const { return spec_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t theta_cap() const { return theta_cap_; }
  std::size_t bucket_count() const { return theta_cap_ + 1; }
  std::size_t pair_count() const { return spec_.l0() * spec_.l1(); }

  /// Number of paths of depth n (|E|^n) and the path with code c at depth n,
  /// returned with x0 prepended.
  std::size_t paths_at(std::size_t depth) const;
  std::vector<Symbol> path_at(std::size_t depth, std::size_t code) const;

  /// Position of a path (x0, x_1..x_n) in the table.
  std::size_t index_of(std::span<const Symbol> path) const;

  /// Raw cell by bucket index: 0..theta_cap-1 for theta = 1..theta_cap,
  /// theta_cap for the tail.
  double cell(std::span<const Symbol> path, std::size_t i, std::size_t j, std::size_t bucket) const;

  /// P(X_1..X_n = path | beta = (i,j)).
  double pair_path_probability(std::span<const Symbol> path, std::size_t i, std::size_t j) const;
  /// P(X_1..X_n = path).
  double path_probability(std::span<const Symbol> path) const;

  /// P(lo <= theta <= hi, path | beta = (i,j)); requires hi <= theta_cap.
  double pair_theta_range(std::span<const Symbol> path, std::size_t i, std::size_t j,
                          std::size_t lo, std::size_t hi) const;
  /// P(lo <= theta <= hi | path), marginal over beta; requires hi <= theta_cap.
  double theta_range_given_path(std::span<const Symbol> path, std::size_t lo, std::size_t hi) const;

  /// Marginal P(theta = t) for t <= theta_cap, read from the root cells.
  double theta_marginal(std::size_t t) const;
  /// Total probability over all paths of the given depth (1 up to rounding).
  double depth_mass(std::size_t depth) const;

  /// Writes "path,i,j,bucket,probability" rows for every cell.
  void write_csv(std::ostream& out) const;

 private:
  JointTable() = default;
  std::size_t offset(std::size_t path_index, std::size_t i, std::size_t j) const;

  ModelSpec spec_;
  std::size_t horizon_ = 0;
  std::size_t theta_cap_ = 0;
  std::vector<std::size_t> depth_offset_;
  std::vector<double> cells_;
};

/// "0-1-1" style rendering of a path.
std::string path_string(std::span<const Symbol> path);

struct ExactPosterior {
  PairMatrix pi;
  PairMatrix b;
};

/// Pi_n and B_n by Bayes' rule on the table. Pairs whose conditional path
/// probability is zero get pi = 0. Throws std::invalid_argument on a
/// zero-probability path.
ExactPosterior exact_posterior(const JointTable& table, std::span<const Symbol> path);

/// P(|theta - n| <= d | path) with n = path.size() - 1.
double exact_detection_probability(const JointTable& table, std::span<const Symbol> path);

/// A stopping rule seen through full horizon paths (x0, x_1..x_H). It must
/// return tau in [0, H] depending on x_0..x_tau only.
using PathRule = std::function<std::size_t(std::span<const Symbol>)>;

/// P(|theta - tau| <= d) for the given rule, by exact enumeration.
double exact_rule_value(const JointTable& table, const PathRule& rule);

struct HistoryNode {
  double probability = 0.0;   ///< P(path)
  double payoff = 0.0;        ///< Z_n = P(|theta - n| <= d | path)
  double continuation = 0.0;  ///< E[V_{n+1} | path]; equals payoff at the horizon
  double value = 0.0;         ///< V_n
  bool stop = false;          ///< optimal action; always true at the horizon
};

/// Backward-induction solution on the history tree up to the table horizon.
class HistoryTreeValue {
 public:
  HistoryTreeValue(const JointTable& table, std::vector<HistoryNode> nodes);

  const HistoryNode& node(std::span<const Symbol> path) const;
  double value() const { return nodes_.front().value; }

  /// First n along the path at which the optimal action is to stop.
  std::size_t stop_time(std::span<const Symbol> path) const;

  /// Writes "path,probability,payoff,continuation,value,stop" rows.
  void write_csv(std::ostream& out) const;

 private:
  const JointTable* table_;
  std::vector<HistoryNode> nodes_;
};

/// Finite-horizon optimal stopping of Z_n on the table. With
/// restrict_after_d, stopping is allowed only at n >= d + 1.
HistoryTreeValue exact_optimal_rule(const JointTable& table, bool restrict_after_d);

/// The same optimum computed by induction over filter states
/// (window, Pi, B) with predictive transition weights, stopping allowed
/// from n = d + 1. Independent of the table.
double state_indexed_optimal_value(const ModelSpec& spec, std::size_t horizon);

}  // namespace disorder
