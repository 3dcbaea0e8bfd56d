#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "disorder/likelihood.hpp"
#include "disorder/model.hpp"
#include "disorder/pair_matrix.hpp"

namespace disorder {

/// Sufficient statistic of the observations up to time n.
///
/// `pi(i,j)` is P(theta <= n | beta = (i,j), X_0..X_n) and `b(i,j)` is
/// P(beta = (i,j) | X_0..X_n). The window keeps the last min(n, d+1) + 1
/// observations, which is d + 2 symbols once n >= d + 1.
struct PosteriorState {
  std::size_t n = 0;
  ObservationWindow window;
  PairMatrix pi;
  PairMatrix b;
};

/// One-step update of P(theta <= n | beta = (i,j), F_n) after observing
/// x_prev -> x_next at time n >= 1.
double pi_step(const ModelSpec& spec, std::size_t i, std::size_t j, double prev_pi, Symbol x_prev,
               Symbol x_next, std::size_t n);

/// Pi_n from Pi_{n-l-1} (the anchor) and the window x_{n-l-1..n} of length
/// l + 2. Valid when the anchor time n - l - 1 is at least 1.
double pi_multi_step(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                     const ObservationWindow& window, double anchor_pi);

/// Pi_{l+1} computed directly from the first l + 2 observations x_0..x_{l+1}.
double pi_initial_segment(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                          const ObservationWindow& window);

/// Inverts pi_multi_step: recovers Pi_{n-l-1} from Pi_n and the window
/// x_{n-l-1..n}, with l = window.size() - 2.
double pi_backshift(const ModelSpec& spec, std::size_t i, std::size_t j,
                    const ObservationWindow& window, double pi_n);

/// P(theta <= n + k | beta = (i,j), F_n) = 1 - p^k (1 - Pi_n), for n >= 1.
double pi_lookahead(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t k, double pi_n);

/// P(theta <= n - k - 1 | beta = (i,j), F_n) from Pi_n and the window
/// x_{n-k-1..n}, k = window.size() - 2. Valid when n - k - 1 >= 1.
double pi_lookback(const ModelSpec& spec, std::size_t i, std::size_t j,
                   const ObservationWindow& window, double pi_n);

/// B_n from B_{n-1} and Pi_{n-1} after observing x_prev -> x_next at time n >= 1.
PairMatrix b_step(const ModelSpec& spec, Symbol x_prev, Symbol x_next, const PairMatrix& prev_b,
                  const PairMatrix& prev_pi, std::size_t n);

PosteriorState state_init(const ModelSpec& spec);

/// Returns the state at time n + 1. Pi and B are both updated from the
/// time-n snapshot.
PosteriorState state_step(const ModelSpec& spec, const PosteriorState& state, Symbol x_next);

/// Runs the filter over observations (x0, x_1, ..., x_n); returns states 0..n.
std::vector<PosteriorState> filter_path(const ModelSpec& spec, std::span<const Symbol> observations);

/// Distribution of X_{n+1} given the information at time n.
std::vector<double> predictive(const ModelSpec& spec, const PosteriorState& state);

/// Sum over pairs of P(theta <= n | beta) * P(beta), i.e. P(theta <= n | F_n).
double change_probability(const PosteriorState& state);

}  // namespace disorder
