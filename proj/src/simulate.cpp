#include "disorder/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "disorder/config.hpp"
#include "disorder/oracle.hpp"
#include "disorder/posterior.hpp"
#include "disorder/rng.hpp"

namespace disorder {

namespace {

constexpr std::uint64_t kLatentStream = 1;
constexpr std::uint64_t kObservationStream = 2;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index) {
  return derive_seed(base_seed, index, 0);
}

std::size_t sample_index(std::span<const double> weights, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    cumulative += weights[k];
    last_positive = k;
    if (u < cumulative) return k;
  }
  // Rounding left the total a hair below u.
  return last_positive;
}

Trajectory sample_trajectory(const ModelSpec& spec, std::size_t horizon, std::uint64_t seed) {
  Trajectory out;
  out.seed = seed;
  SplitMix64 latent(derive_seed(seed, 0, kLatentStream));
  SplitMix64 observe(derive_seed(seed, 0, kObservationStream));

  const std::size_t pair = sample_index(spec.b.values(), latent.uniform());
  const std::size_t i = pair / spec.l1();
  const std::size_t j = pair % spec.l1();
  std::size_t theta = 1;
  if (!(latent.uniform() < spec.pi(i, j))) {
    theta = 2;
    while (latent.uniform() < spec.p(i, j)) ++theta;
  }
  out.latent = LatentState{theta, i, j};

  out.observations.reserve(horizon + 1);
  out.observations.push_back(spec.x0);
  for (std::size_t n = 1; n <= horizon; ++n) {
    const Kernel& kernel = n < theta ? spec.pre_kernels[i] : spec.post_kernels[j];
    out.observations.push_back(sample_index(kernel.row(out.observations.back()), observe.uniform()));
  }
  return out;
}

RuleSpec parse_rule(std::string_view name) {
  const std::string text = trim(name);
  RuleSpec rule;
  rule.name = text;
  if (text == "optimal") {
    rule.kind = RuleKind::kOptimal;
  } else if (text == "optimal-literal") {
    rule.kind = RuleKind::kOptimalLiteral;
  } else if (text == "fixed") {
    rule.kind = RuleKind::kFixed;
  } else if (text == "threshold" || text.rfind("threshold:", 0) == 0) {
    rule.kind = RuleKind::kThreshold;
    if (text.size() > 10) {
      std::size_t used = 0;
      try {
        rule.threshold = std::stod(text.substr(10), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != text.size() - 10 || !(rule.threshold >= 0.0 && rule.threshold <= 1.0)) {
        throw std::invalid_argument("threshold level must be a number in [0,1]: " + text);
      }
    }
  } else {
    throw std::invalid_argument("unknown rule '" + text +
                                "' (expected optimal, optimal-literal, fixed, threshold[:level])");
  }
  return rule;
}

std::vector<RuleSpec> parse_rule_list(std::string_view comma_separated) {
  std::vector<RuleSpec> out;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    const std::size_t end = std::min(comma_separated.find(',', start), comma_separated.size());
    out.push_back(parse_rule(comma_separated.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

RuleEvaluator::RuleEvaluator(const ModelSpec& spec, RuleSpec rule, const ValueIterConfig& cfg)
    : spec_(spec), rule_(std::move(rule)), optimal_(spec, [&] {
        ValueIterConfig c = cfg;
        c.first_decision = rule_.kind == RuleKind::kOptimalLiteral ? FirstDecisionRule::kLiteral
                                                                   : FirstDecisionRule::kExpected;
        return c;
      }()) {}

RuleOutcome RuleEvaluator::run(std::span<const Symbol> observations) {
  const std::size_t last = observations.size() - 1;
  RuleOutcome out;
  switch (rule_.kind) {
    case RuleKind::kOptimal:
    case RuleKind::kOptimalLiteral: {
      const RuleRun run = optimal_.run(observations);
      out.stop_time = run.stop_time;
      out.censored = run.censored;
      out.convergence_warning = run.convergence_warning;
      return out;
    }
    case RuleKind::kFixed:
      out.stop_time = std::min(spec_.d + 1, last);
      out.censored = spec_.d + 1 > last;
      return out;
    case RuleKind::kThreshold: {
      PosteriorState state = state_init(spec_);
      for (std::size_t n = 1; n <= last; ++n) {
        state = state_step(spec_, state, observations[n]);
        if (change_probability(state) >= rule_.threshold) {
          out.stop_time = n;
          return out;
        }
      }
      out.stop_time = last;
      out.censored = true;
      return out;
    }
  }
  throw std::logic_error("unhandled rule kind");
}

std::string config_digest(const ModelSpec& spec, const std::vector<RuleSpec>& rules,
                          const ExperimentConfig& cfg) {
  std::ostringstream text;
  text << dump_model(spec) << '|' << cfg.n << '|' << cfg.horizon << '|' << cfg.base_seed << '|'
       << cfg.value_iteration.k_max << '|' << format_double(cfg.value_iteration.tol) << '|'
       << static_cast<int>(cfg.censoring) << '|' << SplitMix64::kVersion;
  for (const RuleSpec& rule : rules) text << '|' << rule.name;
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text.str()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

ExperimentReport monte_carlo_eval(const ModelSpec& spec, const std::vector<RuleSpec>& rules,
                                  const ExperimentConfig& cfg) {
  require_valid(spec);
  cfg.value_iteration.check();
  if (cfg.n == 0) throw std::invalid_argument("monte_carlo_eval: N must be at least 1");
  if (rules.empty()) throw std::invalid_argument("monte_carlo_eval: no rules given");

  // Integer tallies make the reduction independent of the thread split.
  struct Tally {
    std::size_t successes = 0, censored = 0, warnings = 0, tau_sum = 0;
  };
  struct Failure {
    std::size_t index = SIZE_MAX;
    std::string message;
  };

  std::size_t threads = cfg.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.n);

  std::vector<std::vector<Tally>> tallies(threads, std::vector<Tally>(rules.size()));
  std::vector<Failure> failures(threads);

  auto work = [&](std::size_t worker) {
    std::vector<RuleEvaluator> evaluators;
    for (const RuleSpec& rule : rules) evaluators.emplace_back(spec, rule, cfg.value_iteration);
    for (std::size_t index = worker; index < cfg.n; index += threads) {
      try {
        const Trajectory t = sample_trajectory(spec, cfg.horizon, trajectory_seed(cfg.base_seed, index));
        for (std::size_t r = 0; r < rules.size(); ++r) {
          const RuleOutcome outcome = evaluators[r].run(t.observations);
          Tally& tally = tallies[worker][r];
          const std::size_t gap = outcome.stop_time > t.latent.theta ? outcome.stop_time - t.latent.theta
                                                                     : t.latent.theta - outcome.stop_time;
          const bool hit = gap <= spec.d &&
                           !(outcome.censored && cfg.censoring == CensoringPolicy::kFailure);
          tally.successes += hit ? 1 : 0;
          tally.censored += outcome.censored ? 1 : 0;
          tally.warnings += outcome.convergence_warning ? 1 : 0;
          tally.tau_sum += outcome.stop_time;
        }
      } catch (const std::exception& e) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "trajectory %zu (seed 0x%016llx): ", index,
                      static_cast<unsigned long long>(trajectory_seed(cfg.base_seed, index)));
        failures[worker] = Failure{index, buf + std::string(e.what())};
        return;
      }
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (std::thread& t : pool) t.join();
  }

  const auto first_failure = std::min_element(
      failures.begin(), failures.end(), [](const Failure& a, const Failure& b) { return a.index < b.index; });
  if (first_failure->index != SIZE_MAX) throw std::runtime_error(first_failure->message);

  ExperimentReport report;
  report.n = cfg.n;
  report.horizon = cfg.horizon;
  report.base_seed = cfg.base_seed;
  report.config_digest = config_digest(spec, rules, cfg);
  const double N = static_cast<double>(cfg.n);
  for (std::size_t r = 0; r < rules.size(); ++r) {
    Tally total;
    for (const auto& worker : tallies) {
      total.successes += worker[r].successes;
      total.censored += worker[r].censored;
      total.warnings += worker[r].warnings;
      total.tau_sum += worker[r].tau_sum;
    }
    RuleSummary summary;
    summary.rule = rules[r].name;
    summary.successes = total.successes;
    summary.censored = total.censored;
    summary.convergence_warnings = total.warnings;
    summary.estimate = static_cast<double>(total.successes) / N;
    summary.std_error = std::sqrt(summary.estimate * (1.0 - summary.estimate) / N);
    summary.mean_tau = static_cast<double>(total.tau_sum) / N;
    summary.censoring_rate = static_cast<double>(total.censored) / N;
    report.rules.push_back(summary);
  }
  return report;
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "rule,metric,value\n";
  out << "*,n," << report.n << '\n';
  out << "*,horizon," << report.horizon << '\n';
  out << "*,base_seed," << report.base_seed << '\n';
  out << "*,config_digest," << report.config_digest << '\n';
  for (const RuleSummary& r : report.rules) {
    out << r.rule << ",estimate," << format_double(r.estimate) << '\n';
    out << r.rule << ",std_error," << format_double(r.std_error) << '\n';
    out << r.rule << ",mean_tau," << format_double(r.mean_tau) << '\n';
    out << r.rule << ",censoring_rate," << format_double(r.censoring_rate) << '\n';
    out << r.rule << ",successes," << r.successes << '\n';
    out << r.rule << ",censored," << r.censored << '\n';
    out << r.rule << ",convergence_warnings," << r.convergence_warnings << '\n';
  }
  return out.str();
}

ExperimentReport parse_report_csv(std::string_view text) {
  ExperimentReport report;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || trim(line) != "rule,metric,value") {
    throw std::invalid_argument("report CSV: missing header");
  }
  auto summary_for = [&report](const std::string& rule) -> RuleSummary& {
    for (RuleSummary& r : report.rules) {
      if (r.rule == rule) return r;
    }
    report.rules.push_back(RuleSummary{});
    report.rules.back().rule = rule;
    return report.rules.back();
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw std::invalid_argument("report CSV: malformed row '" + line + "'");
    }
    const std::string rule = line.substr(0, c1);
    const std::string metric = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string value = line.substr(c2 + 1);
    if (rule == "*") {
      if (metric == "n") report.n = std::stoull(value);
      else if (metric == "horizon") report.horizon = std::stoull(value);
      else if (metric == "base_seed") report.base_seed = std::stoull(value);
      else if (metric == "config_digest") report.config_digest = value;
      else throw std::invalid_argument("report CSV: unknown metric " + metric);
      continue;
    }
    RuleSummary& r = summary_for(rule);
    if (metric == "estimate") r.estimate = std::stod(value);
    else if (metric == "std_error") r.std_error = std::stod(value);
    else if (metric == "mean_tau") r.mean_tau = std::stod(value);
    else if (metric == "censoring_rate") r.censoring_rate = std::stod(value);
    else if (metric == "successes") r.successes = std::stoull(value);
    else if (metric == "censored") r.censored = std::stoull(value);
    else if (metric == "convergence_warnings") r.convergence_warnings = std::stoull(value);
    else throw std::invalid_argument("report CSV: unknown metric " + metric);
  }
  return report;
}

std::string report_json(const ExperimentReport& report) {
  nlohmann::ordered_json doc;
  doc["n"] = report.n;
  doc["horizon"] = report.horizon;
  doc["base_seed"] = report.base_seed;
  doc["config_digest"] = report.config_digest;
  doc["rules"] = nlohmann::ordered_json::array();
  for (const RuleSummary& r : report.rules) {
    doc["rules"].push_back({{"rule", r.rule},
                            {"estimate", r.estimate},
                            {"std_error", r.std_error},
                            {"mean_tau", r.mean_tau},
                            {"censoring_rate", r.censoring_rate},
                            {"successes", r.successes},
                            {"censored", r.censored},
                            {"convergence_warnings", r.convergence_warnings}});
  }
  return doc.dump(2) + "\n";
}

std::string trajectories_csv(const std::vector<Trajectory>& trajectories) {
  std::ostringstream out;
  out << "index,seed,theta,beta1,beta2,observations\n";
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const Trajectory& t = trajectories[k];
    out << k << ',' << t.seed << ',' << t.latent.theta << ',' << t.latent.beta1 << ','
        << t.latent.beta2 << ',' << path_string(t.observations) << '\n';
  }
  return out.str();
}

}  // namespace disorder
