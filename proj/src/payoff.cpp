#include "disorder/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "disorder/errors.hpp"
#include "disorder/numeric.hpp"

namespace disorder {

namespace {

void check_pair_args(const ModelSpec& spec, const PairMatrix& gamma, const PairMatrix& delta) {
  if (gamma.rows() != spec.l0() || gamma.cols() != spec.l1() || !gamma.same_shape(delta)) {
    throw std::invalid_argument("payoff arguments do not match l0 x l1");
  }
}

}  // namespace

double detection_coefficient(const ModelSpec& spec, std::size_t i, std::size_t j,
                             const ObservationWindow& window) {
  if (window.size() != spec.d + 2) {
    throw std::invalid_argument("payoff window must have length d + 2");
  }
  const std::vector<double> ratio = likelihood_ratios(spec, i, j, window);
  const double p = spec.p(i, j);
  double tail = 0.0;
  double p_pow = 1.0;
  for (std::size_t k = 1; k <= spec.d + 1; ++k) {
    p_pow *= p;
    tail += ratio[k] / p_pow;
  }
  return 1.0 - std::pow(p, double(spec.d)) + spec.q(i, j) * tail;
}

double h(const ModelSpec& spec, const ObservationWindow& window, const PairMatrix& gamma,
         const PairMatrix& delta) {
  check_pair_args(spec, gamma, delta);
  double total = 0.0;
  for (std::size_t i = 0; i < spec.l0(); ++i) {
    for (std::size_t j = 0; j < spec.l1(); ++j) {
      const double weight = (1.0 - gamma(i, j)) * delta(i, j);
      if (weight == 0.0) continue;
      total += detection_coefficient(spec, i, j, window) * weight;
    }
  }
  return total;
}

double h_tilde(const ModelSpec& spec, const PairMatrix& gamma, const PairMatrix& delta) {
  check_pair_args(spec, gamma, delta);
  double total = 0.0;
  for (std::size_t i = 0; i < spec.l0(); ++i)
    for (std::size_t j = 0; j < spec.l1(); ++j)
      total += (1.0 - std::pow(spec.p(i, j), double(spec.d)) * (1.0 - gamma(i, j))) * delta(i, j);
  return total;
}

double stopping_payoff(const ModelSpec& spec, const PosteriorState& state) {
  if (state.n < spec.d + 1) {
    throw std::invalid_argument("stopping payoff is defined only for n >= d + 1");
  }
  if (state.n == spec.d + 1) return h_tilde(spec, state.pi, state.b);
  return h(spec, state.window, state.pi, state.b);
}

double detection_prior(const ModelSpec& spec, std::size_t n) {
  CompensatedSum total;
  const std::size_t lo = n > spec.d ? n - spec.d : 1;
  for (std::size_t t = std::max<std::size_t>(lo, 1); t <= n + spec.d; ++t) {
    total += theta_prior_pmf(spec, t);
  }
  return total.value();
}

namespace {

struct CriterionWalker {
  const ModelSpec& spec;
  std::size_t depth;
  std::vector<Symbol> path;
  CompensatedSum total;

  void visit(const PosteriorState& state) {
    if (state.n == depth) {
      const double weight = path_probability(spec, path);
      if (weight > 0.0) total += weight * stopping_payoff(spec, state);
      return;
    }
    for (Symbol y = 0; y < spec.alphabet_size; ++y) {
      if (spec.pre_kernels.front()(state.window.back(), y) == 0.0) continue;
      path.push_back(y);
      visit(state_step(spec, state, y));
      path.pop_back();
    }
  }
};

}  // namespace

CriterionCheck criterion_probability(const ModelSpec& spec, std::size_t n, std::size_t max_paths) {
  if (n < spec.d + 1) {
    throw std::invalid_argument("criterion_probability: n must be at least d + 1");
  }
  if (saturating_pow(spec.alphabet_size, n) > max_paths) {
    throw ResourceError("criterion_probability: path enumeration exceeds budget");
  }
  CriterionCheck out;
  out.from_prior = detection_prior(spec, n);
  CriterionWalker walker{spec, n, {spec.x0}, {}};
  walker.visit(state_init(spec));
  out.from_payoff = walker.total.value();
  return out;
}

}  // namespace disorder
