#pragma once

#include <cstddef>

#include "disorder/likelihood.hpp"
#include "disorder/model.hpp"
#include "disorder/pair_matrix.hpp"
#include "disorder/posterior.hpp"

namespace disorder {

/// 1 - p^d + q * sum_{k=1..d+1} L_k / (p^k L_0) over a window of length d + 2.
/// Multiplied by P(theta > n, beta = (i,j) | F_n) it gives the pair's share
/// of P(|theta - n| <= d | F_n).
double detection_coefficient(const ModelSpec& spec, std::size_t i, std::size_t j,
                             const ObservationWindow& window);

/// Stopping payoff for n > d + 1: sum_ij coefficient_ij * (1 - gamma_ij) * delta_ij.
/// Not clamped; on filter states (gamma = Pi_n, delta = B_n) it is a probability.
double h(const ModelSpec& spec, const ObservationWindow& window, const PairMatrix& gamma,
         const PairMatrix& delta);

/// Stopping payoff at n = d + 1: sum_ij (1 - p^d (1 - gamma_ij)) * delta_ij.
double h_tilde(const ModelSpec& spec, const PairMatrix& gamma, const PairMatrix& delta);

/// P(|theta - n| <= d | F_n) for a filter state with n >= d + 1, dispatching
/// to h_tilde at n = d + 1 and to h afterwards.
double stopping_payoff(const ModelSpec& spec, const PosteriorState& state);

/// P(|theta - n| <= d) from the prior law of theta alone.
double detection_prior(const ModelSpec& spec, std::size_t n);

struct CriterionCheck {
  double from_prior = 0.0;   ///< sum of the theta pmf over [n - d, n + d]
  double from_payoff = 0.0;  ///< exact expectation of the payoff over all paths of length n
};

/// Both routes to P(|theta - n| <= d) for n >= d + 1. Enumerates |E|^n paths;
/// throws ResourceError beyond `max_paths`.
CriterionCheck criterion_probability(const ModelSpec& spec, std::size_t n,
                                     std::size_t max_paths = 10'000'000);

}  // namespace disorder
