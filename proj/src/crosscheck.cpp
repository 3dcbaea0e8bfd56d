#include "disorder/crosscheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "disorder/numeric.hpp"
#include "disorder/payoff.hpp"
#include "disorder/simulate.hpp"
#include "disorder/stopping.hpp"

namespace disorder {

std::string CheckResult::line() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %s max_error=%.3e tol=%.0e cases=%zu", passed() ? "PASS" : "FAIL",
                name.c_str(), max_error, tolerance, cases);
  return buf;
}

namespace {

class Tracker {
 public:
  Tracker(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
  }

  void add(double actual, double expected) { add_error(std::abs(actual - expected)); }
  void add_error(double error) {
    ++result_.cases;
    // NaN counts as an unbounded error.
    result_.max_error = std::isnan(error) ? INFINITY : std::max(result_.max_error, error);
  }
  CheckResult result() const { return result_; }

 private:
  CheckResult result_;
};

// Visits every positive-probability path of depth 0..H with its filter states 0..n.
void for_each_path(const JointTable& table,
                   const std::function<void(const std::vector<Symbol>&,
                                            const std::vector<PosteriorState>&)>& visit) {
  const ModelSpec& spec = table.spec();
  std::vector<Symbol> path{spec.x0};
  std::vector<PosteriorState> states{state_init(spec)};
  std::function<void()> walk = [&] {
    visit(path, states);
    if (path.size() - 1 == table.horizon()) return;
    for (Symbol y = 0; y < spec.alphabet_size; ++y) {
      path.push_back(y);
      if (table.path_probability(path) > 0.0) {
        states.push_back(state_step(spec, states.back(), y));
        walk();
        states.pop_back();
      }
      path.pop_back();
    }
  };
  walk();
}

ObservationWindow window_of(const std::vector<Symbol>& path, std::size_t first, std::size_t last) {
  return ObservationWindow(std::vector<Symbol>(path.begin() + first, path.begin() + last + 1));
}

}  // namespace

CheckResult check_joint_mass(const JointTable& table) {
  Tracker t("joint_mass", 1e-12);
  for (std::size_t n = 0; n <= table.horizon(); ++n) t.add(table.depth_mass(n), 1.0);
  return t.result();
}

CheckResult check_theta_marginal(const JointTable& table) {
  Tracker t("theta_marginal", 1e-12);
  for (std::size_t k = 1; k <= table.theta_cap(); ++k) {
    t.add(table.theta_marginal(k), theta_prior_pmf(table.spec(), k));
  }
  return t.result();
}

CheckResult check_path_probability(const JointTable& table) {
  Tracker t("path_probability", 1e-12);
  for (std::size_t n = 1; n <= table.horizon(); ++n) {
    for (std::size_t code = 0; code < table.paths_at(n); ++code) {
      const std::vector<Symbol> path = table.path_at(n, code);
      t.add(table.path_probability(path), path_probability(table.spec(), path));
    }
  }
  return t.result();
}

CheckResult check_filter_posterior(const JointTable& table) {
  Tracker t("filter_posterior", 1e-10);
  for_each_path(table, [&](const auto& path, const auto& states) {
    const ExactPosterior exact = exact_posterior(table, path);
    const PosteriorState& s = states.back();
    double err = 0.0;
    for (std::size_t k = 0; k < s.pi.size(); ++k) {
      err = std::max(err, std::abs(s.pi.values()[k] - exact.pi.values()[k]));
      err = std::max(err, std::abs(s.b.values()[k] - exact.b.values()[k]));
    }
    t.add_error(err);
  });
  return t.result();
}

CheckResult check_lookahead(const JointTable& table, std::size_t max_k) {
  Tracker t("lookahead", 1e-10);
  const ModelSpec& spec = table.spec();
  if (table.horizon() + max_k > table.theta_cap()) {
    throw std::invalid_argument("check_lookahead: theta_cap must cover horizon + k");
  }
  for_each_path(table, [&](const auto& path, const auto& states) {
    const std::size_t n = path.size() - 1;
    if (n == 0) return;
    for (std::size_t i = 0; i < spec.l0(); ++i) {
      for (std::size_t j = 0; j < spec.l1(); ++j) {
        const double mass = table.pair_path_probability(path, i, j);
        if (!(mass > 0.0)) continue;
        for (std::size_t k = 1; k <= max_k; ++k) {
          t.add(pi_lookahead(spec, i, j, k, states.back().pi(i, j)),
                table.pair_theta_range(path, i, j, 1, n + k) / mass);
        }
      }
    }
  });
  return t.result();
}

CheckResult check_lookback(const JointTable& table) {
  Tracker t("lookback", 1e-10);
  const ModelSpec& spec = table.spec();
  for_each_path(table, [&](const auto& path, const auto& states) {
    const std::size_t n = path.size() - 1;
    for (std::size_t i = 0; i < spec.l0(); ++i) {
      for (std::size_t j = 0; j < spec.l1(); ++j) {
        const double mass = table.pair_path_probability(path, i, j);
        if (!(mass > 0.0)) continue;
        for (std::size_t k = 0; k + 1 <= n; ++k) {
          const std::size_t cut = n - k - 1;
          const double exact = cut == 0 ? 0.0 : table.pair_theta_range(path, i, j, 1, cut) / mass;
          const double formula =
              cut == 0 ? 0.0 : pi_lookback(spec, i, j, window_of(path, cut, n), states.back().pi(i, j));
          t.add(formula, exact);
        }
      }
    }
  });
  return t.result();
}

CheckResult check_predictive(const JointTable& table) {
  Tracker t("predictive_chain_rule", 1e-12);
  const ModelSpec& spec = table.spec();
  for_each_path(table, [&](const auto& path, const auto& states) {
    if (path.size() - 1 == table.horizon()) return;
    const std::vector<double> pred = predictive(spec, states.back());
    const double mass = table.path_probability(path);
    std::vector<Symbol> child = path;
    child.push_back(0);
    for (Symbol y = 0; y < spec.alphabet_size; ++y) {
      child.back() = y;
      t.add(pred[y], table.path_probability(child) / mass);
    }
  });
  return t.result();
}

CheckResult check_multi_step(const JointTable& table) {
  Tracker t("multi_step", 1e-12);
  const ModelSpec& spec = table.spec();
  for_each_path(table, [&](const auto& path, const auto& states) {
    const std::size_t n = path.size() - 1;
    if (n == 0) return;
    for (std::size_t i = 0; i < spec.l0(); ++i) {
      for (std::size_t j = 0; j < spec.l1(); ++j) {
        const double target = states[n].pi(i, j);
        t.add(pi_initial_segment(spec, i, j, n - 1, window_of(path, 0, n)), target);
        for (std::size_t l = 0; l + 2 <= n; ++l) {
          const std::size_t anchor = n - l - 1;
          t.add(pi_multi_step(spec, i, j, l, window_of(path, anchor, n), states[anchor].pi(i, j)), target);
        }
      }
    }
  });
  return t.result();
}

CheckResult check_backshift(const JointTable& table) {
  Tracker t("backshift", 1e-9);
  const ModelSpec& spec = table.spec();
  for_each_path(table, [&](const auto& path, const auto& states) {
    const std::size_t n = path.size() - 1;
    for (std::size_t i = 0; i < spec.l0(); ++i) {
      for (std::size_t j = 0; j < spec.l1(); ++j) {
        for (std::size_t l = 0; l + 2 <= n; ++l) {
          const std::size_t anchor = n - l - 1;
          t.add(pi_backshift(spec, i, j, window_of(path, anchor, n), states[n].pi(i, j)),
                states[anchor].pi(i, j));
        }
      }
    }
  });
  return t.result();
}

CheckResult check_payoff_identity(const JointTable& table) {
  Tracker t("payoff_identity", 1e-10);
  const ModelSpec& spec = table.spec();
  std::vector<CompensatedSum> expectation(table.horizon() + 1);
  for_each_path(table, [&](const auto& path, const auto& states) {
    const std::size_t n = path.size() - 1;
    if (n < spec.d + 1) return;
    expectation[n] += table.path_probability(path) * stopping_payoff(spec, states.back());
  });
  for (std::size_t n = spec.d + 1; n <= table.horizon(); ++n) {
    t.add(expectation[n].value(), detection_prior(spec, n));
  }
  return t.result();
}

CheckResult check_payoff_conditional(const JointTable& table) {
  Tracker t("payoff_conditional", 1e-10);
  const ModelSpec& spec = table.spec();
  for_each_path(table, [&](const auto& path, const auto& states) {
    if (path.size() - 1 < spec.d + 1) return;
    t.add(stopping_payoff(spec, states.back()), exact_detection_probability(table, path));
  });
  return t.result();
}

CheckResult check_restriction_after_d(const JointTable& table) {
  Tracker t("restriction_after_d", 1e-12);
  t.add(exact_optimal_rule(table, true).value(), exact_optimal_rule(table, false).value());
  return t.result();
}

CheckResult check_state_vs_path_induction(const JointTable& table) {
  Tracker t("state_vs_path_induction", 1e-12);
  t.add(state_indexed_optimal_value(table.spec(), table.horizon()),
        exact_optimal_rule(table, true).value());
  return t.result();
}

CheckResult check_s0_closed_form(const ModelSpec& spec, const std::vector<PosteriorState>& states) {
  Tracker t("s0_closed_form", 1e-12);
  ValueIterator values(spec, ValueIterConfig{});
  for (const PosteriorState& s : states) {
    const double closed = values.s0(s.window, s.pi, s.b);
    const std::vector<double> pred = predictive(spec, s);
    CompensatedSum expected;
    for (Symbol y = 0; y < spec.alphabet_size; ++y) {
      if (pred[y] == 0.0) continue;
      const PosteriorState next = state_step(spec, s, y);
      expected += pred[y] * h(spec, next.window, next.pi, next.b);
    }
    t.add(closed, expected.value());
    t.add(values.s_sequence(0, s.window, s.pi, s.b)[0], closed);
  }
  return t.result();
}

CheckResult check_normalization(const ModelSpec& spec,
                                const std::vector<std::vector<Symbol>>& streams, std::size_t k) {
  Tracker t("s_k_normalization", 1e-9);
  ValueIterator values(spec, ValueIterConfig{});
  for (const std::vector<Symbol>& stream : streams) {
    PosteriorState state = state_init(spec);
    for (std::size_t n = 0; n + 1 < stream.size(); ++n) {
      const PosteriorState next = state_step(spec, state, stream[n + 1]);
      if (n >= 1 && next.n >= spec.d + 1) {
        const Symbol x = stream[n];
        const Symbol y = stream[n + 1];
        // S(0, (x, y), B_n, Pi_n): the one-step predictive probability of y.
        const double norm = mixture_s(spec, 0, ObservationWindow{x, y}, state.b, state.pi);
        PairMatrix scaled(spec.l0(), spec.l1());
        for (std::size_t i = 0; i < spec.l0(); ++i)
          for (std::size_t j = 0; j < spec.l1(); ++j)
            scaled(i, j) = spec.p(i, j) * spec.pre_kernels[i](x, y) * state.b(i, j);
        const double lhs = values.s_k(k, next.window, next.pi, next.b) * norm;
        const double rhs = values.s_k(k, next.window, state.pi, scaled);
        t.add(lhs, rhs);
      }
      state = next;
    }
  }
  return t.result();
}

CheckResult check_monotone(const ModelSpec& spec, const std::vector<PosteriorState>& states,
                           std::size_t k) {
  Tracker t("s_k_monotone", 1e-12);
  ValueIterator values(spec, ValueIterConfig{});
  for (const PosteriorState& s : states) {
    const std::vector<double> seq = values.s_sequence(k, s.window, s.pi, s.b);
    double violation = 0.0;
    for (std::size_t m = 1; m < seq.size(); ++m) violation = std::max(violation, seq[m - 1] - seq[m]);
    t.add_error(violation);
  }
  return t.result();
}

CheckResult check_upper_bound(const ModelSpec& spec, const std::vector<PosteriorState>& states,
                              std::size_t k) {
  Tracker t("s_k_at_most_one", 1e-12);
  ValueIterator values(spec, ValueIterConfig{});
  for (const PosteriorState& s : states) {
    t.add_error(std::max(0.0, values.s_k(k, s.window, s.pi, s.b) - 1.0));
  }
  return t.result();
}

std::vector<std::vector<Symbol>> sample_streams(const ModelSpec& spec, std::size_t count,
                                                std::size_t length, std::uint64_t seed) {
  std::vector<std::vector<Symbol>> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(sample_trajectory(spec, length, trajectory_seed(seed, k)).observations);
  }
  return out;
}

std::vector<PosteriorState> probe_states(const ModelSpec& spec, std::size_t count,
                                         std::size_t stream_length, std::uint64_t seed) {
  if (stream_length < spec.d + 1) throw std::invalid_argument("probe_states: streams too short");
  std::vector<PosteriorState> out;
  out.reserve(count);
  for (std::size_t k = 0; out.size() < count; ++k) {
    const Trajectory t = sample_trajectory(spec, stream_length, trajectory_seed(seed, k));
    const std::vector<PosteriorState> states = filter_path(spec, t.observations);
    // One state per stream, at a time spread over [d + 1, stream_length].
    const std::size_t span = stream_length - spec.d;
    out.push_back(states[spec.d + 1 + k % span]);
  }
  return out;
}

std::vector<CheckResult> run_crosscheck(const ModelSpec& spec, const CrosscheckOptions& options) {
  require_valid(spec);
  if (options.horizon < spec.d + 1) throw std::invalid_argument("crosscheck: horizon must be >= d + 1");
  const JointTable table = JointTable::build(spec, options.horizon,
                                             options.horizon + std::max(spec.d, options.lookahead));
  const std::vector<PosteriorState> probes =
      probe_states(spec, options.probe_states, options.trajectory_length, options.seed);
  const std::vector<std::vector<Symbol>> streams =
      sample_streams(spec, options.trajectories, options.trajectory_length, options.seed + 1);

  return {
      check_joint_mass(table),
      check_theta_marginal(table),
      check_path_probability(table),
      check_filter_posterior(table),
      check_lookahead(table, options.lookahead),
      check_lookback(table),
      check_predictive(table),
      check_multi_step(table),
      check_backshift(table),
      check_payoff_identity(table),
      check_payoff_conditional(table),
      check_restriction_after_d(table),
      check_state_vs_path_induction(table),
      check_s0_closed_form(spec, probes),
      check_normalization(spec, streams, options.value_k),
      check_monotone(spec, probes, options.value_k),
      check_upper_bound(spec, probes, options.value_k),
  };
}

}  // namespace disorder
