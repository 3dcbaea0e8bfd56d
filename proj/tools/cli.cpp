#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "disorder/config.hpp"
#include "disorder/crosscheck.hpp"
#include "disorder/errors.hpp"
#include "disorder/oracle.hpp"
#include "disorder/simulate.hpp"
#include "disorder/stopping.hpp"

namespace disorder::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kOutputDirEnv = "DISORDER_OUTPUT_DIR";

struct InvariantFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void error_record(std::ostream& err, const std::string& kind, const std::string& message) {
  nlohmann::json record{{"error", kind}, {"message", message}};
  err << record.dump() << '\n';
}

fs::path resolve_output(const std::string& path) {
  fs::path out(path);
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir != nullptr && *dir != '\0' && out.is_relative()) out = fs::path(dir) / out;
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << text;
  if (!file) throw std::runtime_error("failed writing " + path.string());
}

ModelSpec load_valid(const std::string& path) {
  ModelSpec spec = load_model(path);
  require_valid(spec);
  return spec;
}

FirstDecisionRule parse_first_decision(const std::string& text) {
  if (text == "expected") return FirstDecisionRule::kExpected;
  if (text == "literal") return FirstDecisionRule::kLiteral;
  throw CLI::ValidationError("--first-decision", "expected 'expected' or 'literal'");
}

struct Options {
  std::string config;
  std::size_t n = 10'000;
  std::size_t horizon = 20;
  std::uint64_t seed = 0;
  std::string out;
  std::string json_out;
  std::string rules = "optimal,fixed,threshold";
  std::size_t k_max = 10;
  double tol = 1e-8;
  std::size_t probes = 200;
  std::string first_decision = "expected";
  std::string censoring = "forced";
  std::size_t threads = 0;
  std::string dump_dir;
};

ValueIterConfig value_config(const Options& o) {
  ValueIterConfig cfg;
  cfg.k_max = o.k_max;
  cfg.tol = o.tol;
  cfg.probe_points = o.probes;
  cfg.first_decision = parse_first_decision(o.first_decision);
  cfg.check();
  return cfg;
}

int run_validate(const Options& o, std::ostream& out, std::ostream& err) {
  ModelSpec spec;
  try {
    spec = load_model(o.config);
  } catch (const ConfigError& e) {
    error_record(err, "config", e.what());
    return kValidation;
  }
  const ValidationReport report = validate(spec);
  if (report.ok()) {
    out << "ok: " << o.config << '\n';
    return kSuccess;
  }
  for (const std::string& v : report.violations) error_record(err, "validation", v);
  return kValidation;
}

int run_simulate(const Options& o, std::ostream& out) {
  const ModelSpec spec = load_valid(o.config);
  std::vector<Trajectory> trajectories;
  trajectories.reserve(o.n);
  for (std::size_t k = 0; k < o.n; ++k) {
    trajectories.push_back(sample_trajectory(spec, o.horizon, trajectory_seed(o.seed, k)));
  }
  const fs::path path = resolve_output(o.out);
  write_file(path, trajectories_csv(trajectories));
  out << "wrote " << o.n << " trajectories to " << path.string() << '\n';
  return kSuccess;
}

int run_evaluate(const Options& o, std::ostream& out) {
  const ModelSpec spec = load_valid(o.config);
  const std::vector<RuleSpec> rules = parse_rule_list(o.rules);
  ExperimentConfig cfg;
  cfg.n = o.n;
  cfg.horizon = o.horizon;
  cfg.base_seed = o.seed;
  cfg.value_iteration = value_config(o);
  cfg.threads = o.threads;
  if (o.censoring == "forced") {
    cfg.censoring = CensoringPolicy::kForcedStop;
  } else if (o.censoring == "failure") {
    cfg.censoring = CensoringPolicy::kFailure;
  } else {
    throw CLI::ValidationError("--censoring", "expected 'forced' or 'failure'");
  }

  const ExperimentReport report = monte_carlo_eval(spec, rules, cfg);
  const fs::path path = resolve_output(o.out);
  write_file(path, report_csv(report));
  if (!o.json_out.empty()) write_file(resolve_output(o.json_out), report_json(report));
  for (const RuleSummary& r : report.rules) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-18s P(|theta-tau|<=d) = %.6f +- %.6f  mean tau %.3f  censored %.4f\n",
                  r.rule.c_str(), r.estimate, r.std_error, r.mean_tau, r.censoring_rate);
    out << buf;
  }
  out << "config digest " << report.config_digest << ", report written to " << path.string() << '\n';
  return kSuccess;
}

int run_value_iterate(const Options& o, std::ostream& out) {
  const ModelSpec spec = load_valid(o.config);
  const ValueIterConfig cfg = value_config(o);
  ValueIterator values(spec, cfg);
  const std::vector<PosteriorState> probes =
      probe_states(spec, cfg.probe_points, std::max<std::size_t>(o.horizon, spec.d + 1), o.seed);

  std::ostringstream csv;
  csv << "probe,n,k,s_k\n";
  std::size_t converged = 0;
  std::size_t violations = 0;
  double worst_increment = 0.0;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const std::vector<double> seq = values.s_sequence(cfg.k_max, probes[p].window, probes[p].pi, probes[p].b);
    bool ok = false;
    for (std::size_t k = 0; k < seq.size(); ++k) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", seq[k]);
      csv << p << ',' << probes[p].n << ',' << k << ',' << buf << '\n';
      if (k == 0) continue;
      ok = ok || std::abs(seq[k] - seq[k - 1]) <= cfg.tol;
      if (seq[k] < seq[k - 1] - 1e-12) ++violations;
    }
    converged += ok ? 1 : 0;
    worst_increment = std::max(worst_increment, seq.back() - seq[seq.size() - 2]);
  }
  if (!o.out.empty()) write_file(resolve_output(o.out), csv.str());

  out << "probes " << probes.size() << ", converged within k_max=" << cfg.k_max << ": " << converged
      << ", largest final increment " << worst_increment << ", monotonicity violations " << violations
      << '\n';
  if (violations > 0) throw InvariantFailure("s_k decreased in k at some probe state");
  return kSuccess;
}

int run_oracle(const Options& o, std::ostream& out) {
  const ModelSpec spec = load_valid(o.config);
  const JointTable table = JointTable::build(spec, o.horizon);
  const HistoryTreeValue tree = exact_optimal_rule(table, true);

  ValueIterConfig cfg = value_config(o);
  OptimalRule rule(spec, cfg);
  const double tau_star = exact_rule_value(table, [&](std::span<const Symbol> path) {
    return rule.run(path).stop_time;
  });
  const double fixed = exact_rule_value(table, [&](std::span<const Symbol>) {
    return std::min(spec.d + 1, o.horizon);
  });

  nlohmann::ordered_json doc;
  doc["horizon"] = o.horizon;
  doc["optimal_value"] = tree.value();
  doc["optimal_value_unrestricted"] = exact_optimal_rule(table, false).value();
  doc["optimal_value_state_indexed"] = state_indexed_optimal_value(spec, o.horizon);
  doc["tau_star_value"] = tau_star;
  doc["fixed_rule_value"] = fixed;
  doc["theta_tail_beyond_horizon"] = 1.0 - [&] {
    double total = 0.0;
    for (std::size_t k = 1; k <= o.horizon; ++k) total += theta_prior_pmf(spec, k);
    return total;
  }();
  out << doc.dump(2) << '\n';

  if (!o.dump_dir.empty()) {
    const fs::path dir = resolve_output(o.dump_dir);
    std::ostringstream joint, history;
    table.write_csv(joint);
    tree.write_csv(history);
    write_file(dir / "joint.csv", joint.str());
    write_file(dir / "history.csv", history.str());
  }
  return kSuccess;
}

int run_crosscheck_cmd(const Options& o, std::ostream& out) {
  const ModelSpec spec = load_valid(o.config);
  CrosscheckOptions options;
  options.horizon = o.horizon;
  options.seed = o.seed;
  options.probe_states = o.probes;
  bool all = true;
  for (const CheckResult& r : run_crosscheck(spec, options)) {
    out << r.line() << '\n';
    all = all && r.passed();
  }
  if (!all) throw InvariantFailure("crosscheck: at least one identity failed");
  return kSuccess;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential change-point detection with an uncertain kernel pair"};
  app.require_subcommand(1);
  Options o;

  auto add_config = [&o](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "Model JSON file")->required()->check(CLI::ExistingFile);
  };
  auto add_value = [&o](CLI::App* cmd) {
    cmd->add_option("--kmax", o.k_max, "Largest value-iteration index")->capture_default_str();
    cmd->add_option("--tol", o.tol, "Cauchy tolerance on s_k - s_{k-1}")->capture_default_str();
    cmd->add_option("--first-decision", o.first_decision, "expected | literal")->capture_default_str();
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a model file");
  validate_cmd->add_option("config", o.config, "Model JSON file")->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Sample trajectories to CSV");
  add_config(simulate_cmd);
  simulate_cmd->add_option("--n", o.n, "Number of trajectories")->capture_default_str();
  simulate_cmd->add_option("--horizon", o.horizon, "Observations per trajectory")->capture_default_str();
  simulate_cmd->add_option("--seed", o.seed, "Base seed")->required();
  simulate_cmd->add_option("--out", o.out, "Output CSV")->required();

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Monte Carlo evaluation of stopping rules");
  add_config(evaluate_cmd);
  add_value(evaluate_cmd);
  evaluate_cmd->add_option("--rules", o.rules, "optimal, optimal-literal, fixed, threshold[:level]")
      ->capture_default_str();
  evaluate_cmd->add_option("--n", o.n, "Number of trajectories")->capture_default_str();
  evaluate_cmd->add_option("--horizon", o.horizon, "Forced stop time")->capture_default_str();
  evaluate_cmd->add_option("--seed", o.seed, "Base seed")->required();
  evaluate_cmd->add_option("--out", o.out, "Report CSV")->required();
  evaluate_cmd->add_option("--json", o.json_out, "Also write the report as JSON");
  evaluate_cmd->add_option("--censoring", o.censoring, "forced | failure")->capture_default_str();
  evaluate_cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();

  auto* value_cmd = app.add_subcommand("value-iterate", "Inspect s_k convergence on probe states");
  add_config(value_cmd);
  add_value(value_cmd);
  value_cmd->add_option("--probe", o.probes, "Number of probe states")->capture_default_str();
  value_cmd->add_option("--horizon", o.horizon, "Length of the streams probes are drawn from")
      ->capture_default_str();
  value_cmd->add_option("--seed", o.seed, "Seed for probe streams")->capture_default_str();
  value_cmd->add_option("--out", o.out, "Write every s_k to this CSV");

  auto* oracle_cmd = app.add_subcommand("oracle", "Exact finite-horizon values by enumeration");
  add_config(oracle_cmd);
  add_value(oracle_cmd);
  oracle_cmd->add_option("--horizon", o.horizon, "Horizon H")->required();
  oracle_cmd->add_option("--dump", o.dump_dir, "Directory for joint.csv and history.csv");

  auto* cross_cmd = app.add_subcommand("crosscheck", "Run the invariant battery");
  add_config(cross_cmd);
  cross_cmd->add_option("--horizon", o.horizon, "Enumeration horizon")->required();
  cross_cmd->add_option("--seed", o.seed, "Seed for sampled states")->capture_default_str();
  cross_cmd->add_option("--probe", o.probes, "Number of probe states")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    error_record(err, "usage", e.what());
    return kUsage;
  }

  try {
    if (validate_cmd->parsed()) return run_validate(o, out, err);
    if (simulate_cmd->parsed()) return run_simulate(o, out);
    if (evaluate_cmd->parsed()) return run_evaluate(o, out);
    if (value_cmd->parsed()) return run_value_iterate(o, out);
    if (oracle_cmd->parsed()) return run_oracle(o, out);
    if (cross_cmd->parsed()) return run_crosscheck_cmd(o, out);
  } catch (const CLI::ParseError& e) {
    error_record(err, "usage", e.what());
    return kUsage;
  } catch (const InvariantFailure& e) {
    error_record(err, "invariant", e.what());
    return kInvariant;
  } catch (const ConfigError& e) {
    error_record(err, "config", e.what());
    return kValidation;
  } catch (const ModelError& e) {
    error_record(err, "validation", e.what());
    return kValidation;
  } catch (const ResourceError& e) {
    error_record(err, "resource", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    error_record(err, "runtime", e.what());
    return kUsage;
  }
  return kUsage;
}

}  // namespace disorder::cli
