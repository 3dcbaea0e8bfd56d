#include "disorder/stopping.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "disorder/errors.hpp"
#include "disorder/numeric.hpp"
#include "disorder/payoff.hpp"

namespace disorder {

void ValueIterConfig::check() const {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
}

std::size_t ValueIterator::KeyHash::operator()(const std::vector<std::uint64_t>& key) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t v : key) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

ValueIterator::ValueIterator(ModelSpec spec, ValueIterConfig cfg)
    : spec_(std::move(spec)), cfg_(cfg) {
  require_valid(spec_);
  cfg_.check();
}

void ValueIterator::check_window(const ObservationWindow& window) const {
  if (window.size() != spec_.d + 2) {
    throw std::invalid_argument("value iteration needs a window of length d + 2");
  }
  for (Symbol s : window.symbols()) {
    if (s >= spec_.alphabet_size) throw std::out_of_range("window symbol outside alphabet");
  }
}

void ValueIterator::check_budget(std::size_t k) const {
  std::size_t nodes = 0;
  for (std::size_t t = 1; t <= k + 1; ++t) {
    nodes += saturating_pow(spec_.alphabet_size, t);
    if (nodes > cfg_.node_budget) {
      throw ResourceError("value iteration: expectation tree for k = " + std::to_string(k) +
                          " exceeds the node budget");
    }
  }
}

std::vector<double> ValueIterator::pair_weights(const PairMatrix& gamma,
                                                const PairMatrix& delta) const {
  if (gamma.rows() != spec_.l0() || gamma.cols() != spec_.l1() || !gamma.same_shape(delta)) {
    throw std::invalid_argument("value iteration: gamma/delta do not match l0 x l1");
  }
  std::vector<double> u(gamma.size());
  for (std::size_t t = 0; t < u.size(); ++t) {
    u[t] = (1.0 - gamma.values()[t]) * delta.values()[t];
  }
  return u;
}

const std::vector<double>& ValueIterator::coefficients(const ObservationWindow& window) {
  std::vector<std::uint64_t> key(window.symbols().begin(), window.symbols().end());
  auto it = coefficient_cache_.find(key);
  if (it != coefficient_cache_.end()) return it->second;
  std::vector<double> c(spec_.l0() * spec_.l1());
  for (std::size_t i = 0; i < spec_.l0(); ++i)
    for (std::size_t j = 0; j < spec_.l1(); ++j)
      c[i * spec_.l1() + j] = detection_coefficient(spec_, i, j, window);
  return coefficient_cache_.emplace(std::move(key), std::move(c)).first->second;
}

double ValueIterator::payoff_u(const ObservationWindow& window, std::span<const double> u) {
  const std::vector<double>& c = coefficients(window);
  double total = 0.0;
  for (std::size_t t = 0; t < u.size(); ++t) total += c[t] * u[t];
  return total;
}

std::vector<double> ValueIterator::sequence_u(std::size_t k, const ObservationWindow& window,
                                              const std::vector<double>& u) {
  std::vector<double> out(k + 1, 0.0);
  double mass = 0.0;
  for (double v : u) mass += v;
  if (!(mass > 0.0)) return out;

  std::vector<double> unit(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) unit[t] = u[t] / mass;

  std::vector<std::uint64_t> key;
  key.reserve(1 + window.size() + unit.size());
  key.push_back(k);
  key.insert(key.end(), window.symbols().begin(), window.symbols().end());
  for (double v : unit) key.push_back(std::bit_cast<std::uint64_t>(v));

  auto it = memo_.find(key);
  if (it == memo_.end()) {
    std::vector<double> value(k + 1, 0.0);
    const Symbol x = window.back();
    const std::size_t l1 = spec_.l1();
    std::vector<double> child_u(unit.size());
    for (Symbol y = 0; y < spec_.alphabet_size; ++y) {
      if (spec_.pre_kernels.front()(x, y) == 0.0) continue;
      const ObservationWindow next = window.shifted(y);
      for (std::size_t i = 0; i < spec_.l0(); ++i) {
        const double f0 = spec_.pre_kernels[i](x, y);
        for (std::size_t j = 0; j < l1; ++j) {
          child_u[i * l1 + j] = spec_.p(i, j) * f0 * unit[i * l1 + j];
        }
      }
      const double stop = payoff_u(next, child_u);
      value[0] += stop;
      if (k > 0) {
        const std::vector<double> child = sequence_u(k - 1, next, child_u);
        for (std::size_t m = 1; m <= k; ++m) value[m] += std::max(stop, child[m - 1]);
      }
    }
    it = memo_.emplace(std::move(key), std::move(value)).first;
  }
  for (std::size_t m = 0; m <= k; ++m) out[m] = it->second[m] * mass;
  return out;
}

double ValueIterator::s0(const ObservationWindow& window, const PairMatrix& gamma,
                         const PairMatrix& delta) const {
  check_window(window);
  const std::vector<double> u = pair_weights(gamma, delta);
  const ObservationWindow tail = window.slice(1, spec_.d + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < spec_.l0(); ++i) {
    for (std::size_t j = 0; j < spec_.l1(); ++j) {
      const double w = u[i * spec_.l1() + j];
      if (w == 0.0) continue;
      const std::vector<double> ratio = likelihood_ratios(spec_, i, j, tail);
      const double p = spec_.p(i, j);
      double sum = 0.0;
      double p_pow = 1.0;
      for (std::size_t m = 1; m <= spec_.d + 1; ++m) {
        p_pow *= p;
        sum += ratio[m - 1] / p_pow;
      }
      total += (1.0 - std::pow(p, double(spec_.d)) + spec_.q(i, j) * sum) * p * w;
    }
  }
  return total;
}

std::vector<double> ValueIterator::s_sequence(std::size_t k, const ObservationWindow& window,
                                              const PairMatrix& gamma, const PairMatrix& delta) {
  check_window(window);
  check_budget(k);
  return sequence_u(k, window, pair_weights(gamma, delta));
}

double ValueIterator::s_k(std::size_t k, const ObservationWindow& window, const PairMatrix& gamma,
                          const PairMatrix& delta) {
  return s_sequence(k, window, gamma, delta).back();
}

std::pair<double, std::size_t> ValueIterator::converged_value(const std::vector<double>& seq,
                                                              bool& converged) const {
  for (std::size_t k = 1; k < seq.size(); ++k) {
    if (std::abs(seq[k] - seq[k - 1]) <= cfg_.tol) {
      converged = true;
      return {seq[k], k};
    }
  }
  converged = false;
  return {seq.back(), seq.size() - 1};
}

StopDecision ValueIterator::decide(const PosteriorState& state) {
  if (state.n < spec_.d + 1) throw std::invalid_argument("decide: state precedes time d + 1");
  const std::vector<double> seq = s_sequence(cfg_.k_max, state.window, state.pi, state.b);
  StopDecision out;
  const auto [value, k] = converged_value(seq, out.converged);
  out.continue_value = value;
  out.k_used = k;
  out.stop_value = h(spec_, state.window, state.pi, state.b);
  out.stop = out.stop_value >= out.continue_value;
  return out;
}

StopDecision ValueIterator::expected_continuation(const PosteriorState& state) {
  if (state.n < spec_.d + 1) {
    throw std::invalid_argument("expected_continuation: state precedes time d + 1");
  }
  const std::vector<double> pred = predictive(spec_, state);
  StopDecision out;
  out.stop_value = stopping_payoff(spec_, state);
  double total = 0.0;
  for (Symbol y = 0; y < spec_.alphabet_size; ++y) {
    if (pred[y] == 0.0) continue;
    const PosteriorState next = state_step(spec_, state, y);
    const std::vector<double> seq = s_sequence(cfg_.k_max, next.window, next.pi, next.b);
    bool converged = true;
    const auto [value, k] = converged_value(seq, converged);
    out.converged = out.converged && converged;
    out.k_used = std::max(out.k_used, k);
    total += pred[y] * std::max(h(spec_, next.window, next.pi, next.b), value);
  }
  out.continue_value = total;
  out.stop = out.stop_value >= out.continue_value;
  return out;
}

double s0(const ModelSpec& spec, const ObservationWindow& window, const PairMatrix& gamma,
          const PairMatrix& delta) {
  return ValueIterator(spec, ValueIterConfig{}).s0(window, gamma, delta);
}

double s_k(const ModelSpec& spec, std::size_t k, const ObservationWindow& window,
           const PairMatrix& gamma, const PairMatrix& delta) {
  ValueIterator values(spec, ValueIterConfig{});
  return values.s_k(k, window, gamma, delta);
}

namespace {

std::string state_key(const PosteriorState& state) {
  std::string key;
  const auto symbols = state.window.symbols();
  const auto pi = state.pi.values();
  const auto b = state.b.values();
  key.resize(symbols.size_bytes() + pi.size_bytes() + b.size_bytes());
  char* out = key.data();
  std::memcpy(out, symbols.data(), symbols.size_bytes());
  out += symbols.size_bytes();
  std::memcpy(out, pi.data(), pi.size_bytes());
  out += pi.size_bytes();
  std::memcpy(out, b.data(), b.size_bytes());
  return key;
}

}  // namespace

OptimalRule::OptimalRule(ModelSpec spec, ValueIterConfig cfg)
    : spec_(spec), cfg_(cfg), values_(std::move(spec), cfg) {}

StopDecision OptimalRule::cached_decide(const PosteriorState& state) {
  std::string key = state_key(state);
  auto it = decide_cache_.find(key);
  if (it != decide_cache_.end()) return it->second;
  const StopDecision out = values_.decide(state);
  decide_cache_.emplace(std::move(key), out);
  return out;
}

StopDecision OptimalRule::cached_first(const PosteriorState& state) {
  std::string key = state_key(state);
  auto it = first_cache_.find(key);
  if (it != first_cache_.end()) return it->second;
  const StopDecision out = values_.expected_continuation(state);
  first_cache_.emplace(std::move(key), out);
  return out;
}

RuleRun OptimalRule::run(std::span<const Symbol> observations) {
  if (observations.empty() || observations.front() != spec_.x0) {
    throw std::invalid_argument("rule_runner: stream must begin at x0");
  }
  RuleRun run;
  PosteriorState state = state_init(spec_);
  const std::size_t first = spec_.d + 1;

  auto record = [&run](std::size_t n, const StopDecision& decision) {
    run.trace.push_back({n, decision});
    run.convergence_warning = run.convergence_warning || !decision.converged;
    return decision.stop;
  };

  for (std::size_t n = 1; n < observations.size(); ++n) {
    state = state_step(spec_, state, observations[n]);
    if (n < first) continue;

    bool stop = false;
    if (n > first) {
      stop = record(n, cached_decide(state));
    } else if (cfg_.first_decision == FirstDecisionRule::kExpected) {
      stop = record(n, cached_first(state));
    } else {
      if (n + 1 >= observations.size()) break;
      const PosteriorState next = state_step(spec_, state, observations[n + 1]);
      StopDecision decision = cached_decide(next);
      decision.stop_value = h_tilde(spec_, state.pi, state.b);
      decision.stop = decision.stop_value >= decision.continue_value;
      stop = record(n, decision);
    }
    if (stop) {
      run.stop_time = n;
      run.last_state = state;
      return run;
    }
  }
  run.censored = true;
  run.stop_time = observations.size() - 1;
  run.last_state = state;
  return run;
}

RuleRun rule_runner(const ModelSpec& spec, std::span<const Symbol> observations,
                    const ValueIterConfig& cfg) {
  return OptimalRule(spec, cfg).run(observations);
}

}  // namespace disorder
