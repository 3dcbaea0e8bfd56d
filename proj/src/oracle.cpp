#include "disorder/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "disorder/errors.hpp"
#include "disorder/numeric.hpp"
#include "disorder/payoff.hpp"
#include "disorder/posterior.hpp"

namespace disorder {

std::string path_string(std::span<const Symbol> path) {
  std::string out;
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (t > 0) out += '-';
    out += std::to_string(path[t]);
  }
  return out;
}

JointTable JointTable::build(const ModelSpec& spec, std::size_t horizon, std::size_t theta_cap,
                             std::size_t cell_budget) {
  require_valid(spec);
  if (theta_cap == 0) theta_cap = horizon + spec.d;
  theta_cap = std::max<std::size_t>(theta_cap, 1);
  if (theta_cap < horizon) throw std::invalid_argument("JointTable: theta_cap must be >= horizon");

  JointTable table;
  table.spec_ = spec;
  table.horizon_ = horizon;
  table.theta_cap_ = theta_cap;

  const std::size_t E = spec.alphabet_size;
  std::size_t paths = 0;
  table.depth_offset_.resize(horizon + 2);
  for (std::size_t n = 0; n <= horizon; ++n) {
    table.depth_offset_[n] = paths;
    const std::size_t count = saturating_pow(E, n);
    if (count == SIZE_MAX || paths > SIZE_MAX - count) throw ResourceError("JointTable: path count overflow");
    paths += count;
  }
  table.depth_offset_[horizon + 1] = paths;

  const std::size_t per_path = table.pair_count() * table.bucket_count();
  if (paths > cell_budget / per_path) {
    throw ResourceError("JointTable: " + std::to_string(paths) + " paths x " +
                        std::to_string(per_path) + " cells exceed the budget of " +
                        std::to_string(cell_budget));
  }
  table.cells_.assign(paths * per_path, 0.0);

  // Root: the conditional prior of theta given the pair.
  for (std::size_t i = 0; i < spec.l0(); ++i) {
    for (std::size_t j = 0; j < spec.l1(); ++j) {
      double* cell = &table.cells_[table.offset(0, i, j)];
      const double pi = spec.pi(i, j);
      const double p = spec.p(i, j);
      const double q = spec.q(i, j);
      cell[0] = pi;
      double p_pow = 1.0;  // p^{t-2}
      for (std::size_t t = 2; t <= theta_cap; ++t) {
        cell[t - 1] = (1.0 - pi) * p_pow * q;
        p_pow *= p;
      }
      cell[theta_cap] = (1.0 - pi) * p_pow;  // p^{cap-1}
    }
  }

  // Extending a depth-n path by y is transition n + 1, post-change iff theta <= n + 1.
  for (std::size_t n = 0; n < horizon; ++n) {
    const std::size_t count = saturating_pow(E, n);
    for (std::size_t code = 0; code < count; ++code) {
      const Symbol x = n == 0 ? spec.x0 : code % E;
      const std::size_t parent = table.depth_offset_[n] + code;
      for (Symbol y = 0; y < E; ++y) {
        const std::size_t child = table.depth_offset_[n + 1] + code * E + y;
        for (std::size_t i = 0; i < spec.l0(); ++i) {
          for (std::size_t j = 0; j < spec.l1(); ++j) {
            const double f0 = spec.pre_kernels[i](x, y);
            const double f1 = spec.post_kernels[j](x, y);
            const double* src = &table.cells_[table.offset(parent, i, j)];
            double* dst = &table.cells_[table.offset(child, i, j)];
            for (std::size_t bucket = 0; bucket <= theta_cap; ++bucket) {
              const bool post = bucket < theta_cap && bucket + 1 <= n + 1;
              dst[bucket] = src[bucket] * (post ? f1 : f0);
            }
          }
        }
      }
    }
  }
  return table;
}

std::size_t JointTable::offset(std::size_t path_index, std::size_t i, std::size_t j) const {
  return (path_index * pair_count() + i * spec_.l1() + j) * bucket_count();
}

std::size_t JointTable::paths_at(std::size_t depth) const {
  if (depth > horizon_) throw std::out_of_range("JointTable: depth beyond horizon");
  return depth_offset_[depth + 1] - depth_offset_[depth];
}

std::vector<Symbol> JointTable::path_at(std::size_t depth, std::size_t code) const {
  if (code >= paths_at(depth)) throw std::out_of_range("JointTable: path code out of range");
  std::vector<Symbol> path(depth + 1);
  path[0] = spec_.x0;
  for (std::size_t t = depth; t >= 1; --t) {
    path[t] = code % spec_.alphabet_size;
    code /= spec_.alphabet_size;
  }
  return path;
}

std::size_t JointTable::index_of(std::span<const Symbol> path) const {
  if (path.empty() || path.front() != spec_.x0) {
    throw std::invalid_argument("JointTable: path must start at x0");
  }
  const std::size_t depth = path.size() - 1;
  if (depth > horizon_) throw std::out_of_range("JointTable: path longer than horizon");
  std::size_t code = 0;
  for (std::size_t t = 1; t <= depth; ++t) {
    if (path[t] >= spec_.alphabet_size) throw std::out_of_range("JointTable: symbol outside alphabet");
    code = code * spec_.alphabet_size + path[t];
  }
  return depth_offset_[depth] + code;
}

double JointTable::cell(std::span<const Symbol> path, std::size_t i, std::size_t j,
                        std::size_t bucket) const {
  if (i >= spec_.l0() || j >= spec_.l1() || bucket > theta_cap_) {
    throw std::out_of_range("JointTable: cell index out of range");
  }
  return cells_[offset(index_of(path), i, j) + bucket];
}

double JointTable::pair_theta_range(std::span<const Symbol> path, std::size_t i, std::size_t j,
                                    std::size_t lo, std::size_t hi) const {
  if (hi > theta_cap_) throw std::out_of_range("JointTable: theta range beyond theta_cap");
  if (i >= spec_.l0() || j >= spec_.l1()) throw std::out_of_range("JointTable: pair out of range");
  lo = std::max<std::size_t>(lo, 1);
  const double* cell = &cells_[offset(index_of(path), i, j)];
  CompensatedSum total;
  for (std::size_t t = lo; t <= hi; ++t) total += cell[t - 1];
  return total.value();
}

double JointTable::pair_path_probability(std::span<const Symbol> path, std::size_t i,
                                         std::size_t j) const {
  if (i >= spec_.l0() || j >= spec_.l1()) throw std::out_of_range("JointTable: pair out of range");
  const double* cell = &cells_[offset(index_of(path), i, j)];
  CompensatedSum total;
  for (std::size_t bucket = 0; bucket <= theta_cap_; ++bucket) total += cell[bucket];
  return total.value();
}

double JointTable::path_probability(std::span<const Symbol> path) const {
  CompensatedSum total;
  for (std::size_t i = 0; i < spec_.l0(); ++i)
    for (std::size_t j = 0; j < spec_.l1(); ++j)
      total += spec_.b(i, j) * pair_path_probability(path, i, j);
  return total.value();
}

double JointTable::theta_range_given_path(std::span<const Symbol> path, std::size_t lo,
                                          std::size_t hi) const {
  const double mass = path_probability(path);
  if (!(mass > 0.0)) throw std::invalid_argument("JointTable: zero-probability path");
  CompensatedSum total;
  for (std::size_t i = 0; i < spec_.l0(); ++i)
    for (std::size_t j = 0; j < spec_.l1(); ++j)
      total += spec_.b(i, j) * pair_theta_range(path, i, j, lo, hi);
  return total.value() / mass;
}

double JointTable::theta_marginal(std::size_t t) const {
  if (t == 0 || t > theta_cap_) throw std::out_of_range("JointTable: theta outside 1..theta_cap");
  const Symbol root[] = {spec_.x0};
  CompensatedSum total;
  for (std::size_t i = 0; i < spec_.l0(); ++i)
    for (std::size_t j = 0; j < spec_.l1(); ++j) total += spec_.b(i, j) * cell(root, i, j, t - 1);
  return total.value();
}

double JointTable::depth_mass(std::size_t depth) const {
  CompensatedSum total;
  for (std::size_t code = 0; code < paths_at(depth); ++code) {
    total += path_probability(path_at(depth, code));
  }
  return total.value();
}

void JointTable::write_csv(std::ostream& out) const {
  out << "path,i,j,bucket,probability\n";
  char buf[64];
  for (std::size_t n = 0; n <= horizon_; ++n) {
    for (std::size_t code = 0; code < paths_at(n); ++code) {
      const std::vector<Symbol> path = path_at(n, code);
      const std::string name = path_string(path);
      for (std::size_t i = 0; i < spec_.l0(); ++i) {
        for (std::size_t j = 0; j < spec_.l1(); ++j) {
          for (std::size_t bucket = 0; bucket <= theta_cap_; ++bucket) {
            std::snprintf(buf, sizeof buf, "%.17g", cell(path, i, j, bucket));
            out << name << ',' << i << ',' << j << ','
                << (bucket < theta_cap_ ? std::to_string(bucket + 1) : ">" + std::to_string(theta_cap_))
                << ',' << buf << '\n';
          }
        }
      }
    }
  }
}

ExactPosterior exact_posterior(const JointTable& table, std::span<const Symbol> path) {
  const ModelSpec& spec = table.spec();
  const std::size_t n = path.size() - 1;
  ExactPosterior out{PairMatrix(spec.l0(), spec.l1(), 0.0), PairMatrix(spec.l0(), spec.l1(), 0.0)};
  const double mass = table.path_probability(path);
  if (!(mass > 0.0)) throw std::invalid_argument("exact_posterior: zero-probability path");
  for (std::size_t i = 0; i < spec.l0(); ++i) {
    for (std::size_t j = 0; j < spec.l1(); ++j) {
      const double pair_mass = table.pair_path_probability(path, i, j);
      out.b(i, j) = spec.b(i, j) * pair_mass / mass;
      if (n > 0 && pair_mass > 0.0) out.pi(i, j) = table.pair_theta_range(path, i, j, 1, n) / pair_mass;
    }
  }
  return out;
}

double exact_detection_probability(const JointTable& table, std::span<const Symbol> path) {
  const std::size_t n = path.size() - 1;
  const std::size_t d = table.spec().d;
  return table.theta_range_given_path(path, n > d ? n - d : 1, n + d);
}

double exact_rule_value(const JointTable& table, const PathRule& rule) {
  const ModelSpec& spec = table.spec();
  const std::size_t H = table.horizon();
  const std::size_t d = spec.d;
  CompensatedSum total;
  for (std::size_t code = 0; code < table.paths_at(H); ++code) {
    const std::vector<Symbol> path = table.path_at(H, code);
    const std::size_t tau = rule(path);
    if (tau > H) throw std::invalid_argument("exact_rule_value: rule stopped after the horizon");
    const std::size_t lo = tau > d ? tau - d : 1;
    for (std::size_t i = 0; i < spec.l0(); ++i) {
      for (std::size_t j = 0; j < spec.l1(); ++j) {
        if (spec.b(i, j) == 0.0) continue;
        total += spec.b(i, j) * table.pair_theta_range(path, i, j, lo, tau + d);
      }
    }
  }
  return total.value();
}

HistoryTreeValue::HistoryTreeValue(const JointTable& table, std::vector<HistoryNode> nodes)
    : table_(&table), nodes_(std::move(nodes)) {}

const HistoryNode& HistoryTreeValue::node(std::span<const Symbol> path) const {
  return nodes_[table_->index_of(path)];
}

std::size_t HistoryTreeValue::stop_time(std::span<const Symbol> path) const {
  for (std::size_t n = 0; n < path.size(); ++n) {
    if (node(path.first(n + 1)).stop) return n;
  }
  throw std::invalid_argument("HistoryTreeValue: path ends before the horizon");
}

void HistoryTreeValue::write_csv(std::ostream& out) const {
  out << "path,probability,payoff,continuation,value,stop\n";
  char buf[160];
  for (std::size_t n = 0; n <= table_->horizon(); ++n) {
    for (std::size_t code = 0; code < table_->paths_at(n); ++code) {
      const std::vector<Symbol> path = table_->path_at(n, code);
      const HistoryNode& v = node(path);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d", v.probability, v.payoff,
                    v.continuation, v.value, v.stop ? 1 : 0);
      out << path_string(path) << ',' << buf << '\n';
    }
  }
}

HistoryTreeValue exact_optimal_rule(const JointTable& table, bool restrict_after_d) {
  const std::size_t H = table.horizon();
  const std::size_t E = table.spec().alphabet_size;
  const std::size_t d = table.spec().d;
  std::vector<HistoryNode> nodes(table.index_of(table.path_at(H, table.paths_at(H) - 1)) + 1);

  for (std::size_t n = H + 1; n-- > 0;) {
    for (std::size_t code = 0; code < table.paths_at(n); ++code) {
      const std::vector<Symbol> path = table.path_at(n, code);
      const std::size_t index = table.index_of(path);
      HistoryNode& node = nodes[index];
      node.probability = table.path_probability(path);
      if (!(node.probability > 0.0)) {
        node.stop = true;
        continue;
      }
      node.payoff = exact_detection_probability(table, path);
      if (n == H) {
        node.continuation = node.payoff;
        node.value = node.payoff;
        node.stop = true;
        continue;
      }
      CompensatedSum weighted;
      std::vector<Symbol> child = path;
      child.push_back(0);
      for (Symbol y = 0; y < E; ++y) {
        child.back() = y;
        const HistoryNode& c = nodes[table.index_of(child)];
        weighted += c.probability * c.value;
      }
      node.continuation = weighted.value() / node.probability;
      const bool allowed = !restrict_after_d || n >= d + 1;
      node.stop = allowed && node.payoff >= node.continuation;
      node.value = node.stop ? node.payoff : node.continuation;
    }
  }
  return HistoryTreeValue(table, std::move(nodes));
}

namespace {

struct StateInduction {
  const ModelSpec& spec;
  std::size_t horizon;

  double value(const PosteriorState& state) {
    const bool allowed = state.n >= spec.d + 1;
    const double payoff = allowed ? stopping_payoff(spec, state) : 0.0;
    if (state.n == horizon) return payoff;
    const std::vector<double> pred = predictive(spec, state);
    CompensatedSum continuation;
    for (Symbol y = 0; y < spec.alphabet_size; ++y) {
      if (pred[y] == 0.0) continue;
      continuation += pred[y] * value(state_step(spec, state, y));
    }
    return allowed ? std::max(payoff, continuation.value()) : continuation.value();
  }
};

}  // namespace

double state_indexed_optimal_value(const ModelSpec& spec, std::size_t horizon) {
  require_valid(spec);
  if (horizon < spec.d + 1) throw std::invalid_argument("state induction needs horizon >= d + 1");
  StateInduction induction{spec, horizon};
  return induction.value(state_init(spec));
}

}  // namespace disorder
