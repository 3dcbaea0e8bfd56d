#include "disorder/posterior.hpp"

#include <cmath>
#include <stdexcept>

#include "disorder/errors.hpp"

namespace disorder {

namespace {

// Denominators below this are treated as a zero-probability observation.
constexpr double kDenominatorFloor = 1e-300;

double checked_ratio(double num, double den, const char* what) {
  if (!(std::abs(den) >= kDenominatorFloor)) {
    throw SupportError(std::string(what) + ": observation outside common support");
  }
  return num / den;
}

void check_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

}  // namespace

double pi_step(const ModelSpec& spec, std::size_t i, std::size_t j, double prev_pi, Symbol x_prev,
               Symbol x_next, std::size_t n) {
  if (n == 0) throw std::invalid_argument("pi_step: n must be >= 1");
  check_probability(prev_pi, "pi_step: prev_pi");
  const double f0 = spec.pre_kernels.at(i)(x_prev, x_next);
  const double f1 = spec.post_kernels.at(j)(x_prev, x_next);
  double changed, unchanged;
  if (n == 1) {
    changed = f1 * spec.pi(i, j);
    unchanged = f0 * (1.0 - spec.pi(i, j));
  } else {
    changed = f1 * (spec.q(i, j) + spec.p(i, j) * prev_pi);
    unchanged = f0 * spec.p(i, j) * (1.0 - prev_pi);
  }
  return checked_ratio(changed, changed + unchanged, "pi_step");
}

double pi_multi_step(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                     const ObservationWindow& window, double anchor_pi) {
  check_probability(anchor_pi, "pi_multi_step: anchor_pi");
  const PsiParts parts = psi_parts(spec, i, j, l, window, false);
  return checked_ratio(parts.lambda(anchor_pi), parts.psi(anchor_pi), "pi_multi_step");
}

double pi_initial_segment(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                          const ObservationWindow& window) {
  const PsiParts parts = psi_parts(spec, i, j, l, window, true);
  const double pi = spec.pi(i, j);
  return checked_ratio(parts.lambda(pi), parts.psi(pi), "pi_initial_segment");
}

double pi_backshift(const ModelSpec& spec, std::size_t i, std::size_t j,
                    const ObservationWindow& window, double pi_n) {
  check_probability(pi_n, "pi_backshift: pi_n");
  if (window.size() < 2) throw std::invalid_argument("pi_backshift: window needs two symbols");
  const PsiParts parts = psi_parts(spec, i, j, window.size() - 2, window, false);
  // Solve pi_n = Lambda(a) / Psi(a) for the anchor a; both are affine in a.
  const double num = (1.0 - pi_n) * parts.change_mix - pi_n * parts.no_change;
  const double den = (1.0 - pi_n) * (parts.change_mix - parts.all_post) - pi_n * parts.no_change;
  return checked_ratio(num, den, "pi_backshift");
}

double pi_lookahead(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t k, double pi_n) {
  check_probability(pi_n, "pi_lookahead: pi_n");
  return 1.0 - std::pow(spec.p(i, j), double(k)) * (1.0 - pi_n);
}

double pi_lookback(const ModelSpec& spec, std::size_t i, std::size_t j,
                   const ObservationWindow& window, double pi_n) {
  check_probability(pi_n, "pi_lookback: pi_n");
  if (window.size() < 2) throw std::invalid_argument("pi_lookback: window needs two symbols");
  const std::vector<double> ratio = likelihood_ratios(spec, i, j, window);
  const double p = spec.p(i, j);
  double sum = 0.0;
  double p_pow = 1.0;
  for (std::size_t s = 1; s < ratio.size(); ++s) {
    p_pow *= p;
    sum += ratio[s] / p_pow;
  }
  return 1.0 - (1.0 - pi_n) * (1.0 + spec.q(i, j) * sum);
}

PairMatrix b_step(const ModelSpec& spec, Symbol x_prev, Symbol x_next, const PairMatrix& prev_b,
                  const PairMatrix& prev_pi, std::size_t n) {
  if (n == 0) throw std::invalid_argument("b_step: n must be >= 1");
  if (prev_b.rows() != spec.l0() || prev_b.cols() != spec.l1() || !prev_b.same_shape(prev_pi)) {
    throw std::invalid_argument("b_step: posterior shape does not match l0 x l1");
  }
  const ObservationWindow step{x_prev, x_next};
  PairMatrix out(spec.l0(), spec.l1());
  double total = 0.0;
  for (std::size_t i = 0; i < spec.l0(); ++i) {
    for (std::size_t j = 0; j < spec.l1(); ++j) {
      const double weight = n == 1 ? psi_tilde(spec, i, j, 0, step, spec.pi(i, j))
                                   : psi(spec, i, j, 0, step, prev_pi(i, j));
      out(i, j) = prev_b(i, j) * weight;
      total += out(i, j);
    }
  }
  if (!(total >= kDenominatorFloor)) throw SupportError("b_step: observation outside common support");
  for (double& v : out.values()) v /= total;
  return out;
}

PosteriorState state_init(const ModelSpec& spec) {
  PosteriorState state;
  state.n = 0;
  state.window = ObservationWindow{spec.x0};
  state.pi = PairMatrix(spec.l0(), spec.l1(), 0.0);
  state.b = spec.b;
  return state;
}

PosteriorState state_step(const ModelSpec& spec, const PosteriorState& state, Symbol x_next) {
  if (x_next >= spec.alphabet_size) throw std::out_of_range("state_step: symbol outside alphabet");
  const Symbol x_prev = state.window.back();
  const std::size_t n = state.n + 1;

  PosteriorState next;
  next.n = n;
  next.window = state.window.appended(x_next, spec.d + 2);
  next.b = b_step(spec, x_prev, x_next, state.b, state.pi, n);
  next.pi = PairMatrix(spec.l0(), spec.l1());
  for (std::size_t i = 0; i < spec.l0(); ++i)
    for (std::size_t j = 0; j < spec.l1(); ++j)
      next.pi(i, j) = pi_step(spec, i, j, state.pi(i, j), x_prev, x_next, n);
  return next;
}

std::vector<PosteriorState> filter_path(const ModelSpec& spec,
                                        std::span<const Symbol> observations) {
  if (observations.empty() || observations.front() != spec.x0) {
    throw std::invalid_argument("filter_path: observations must start at x0");
  }
  std::vector<PosteriorState> states;
  states.reserve(observations.size());
  states.push_back(state_init(spec));
  for (std::size_t n = 1; n < observations.size(); ++n) {
    states.push_back(state_step(spec, states.back(), observations[n]));
  }
  return states;
}

std::vector<double> predictive(const ModelSpec& spec, const PosteriorState& state) {
  const Symbol x = state.window.back();
  std::vector<double> out(spec.alphabet_size, 0.0);
  for (std::size_t i = 0; i < spec.l0(); ++i) {
    for (std::size_t j = 0; j < spec.l1(); ++j) {
      const double w = state.b(i, j);
      if (w == 0.0) continue;
      // Weight of "still pre-change at n+1" versus "post-change at n+1".
      double stay, switched;
      if (state.n == 0) {
        stay = 1.0 - spec.pi(i, j);
        switched = spec.pi(i, j);
      } else {
        stay = spec.p(i, j) * (1.0 - state.pi(i, j));
        switched = spec.q(i, j) + spec.p(i, j) * state.pi(i, j);
      }
      const auto f0 = spec.pre_kernels[i].row(x);
      const auto f1 = spec.post_kernels[j].row(x);
      for (Symbol y = 0; y < spec.alphabet_size; ++y) {
        out[y] += w * (stay * f0[y] + switched * f1[y]);
      }
    }
  }
  return out;
}

double change_probability(const PosteriorState& state) {
  double total = 0.0;
  for (std::size_t k = 0; k < state.pi.size(); ++k) total += state.pi.values()[k] * state.b.values()[k];
  return total;
}

}  // namespace disorder
