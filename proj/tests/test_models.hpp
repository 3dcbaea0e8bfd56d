#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "disorder/model.hpp"

namespace disorder::testing {

// Two symbols, one pair, i.i.d. observations with P(X = 1) = 0.2 before and 0.8 after.
inline ModelSpec m1(std::size_t d = 0, double p = 0.8, double pi = 0.0) {
  ModelSpec s;
  s.alphabet_size = 2;
  s.pre_kernels = {Kernel::from_rows({{0.8, 0.2}, {0.8, 0.2}})};
  s.post_kernels = {Kernel::from_rows({{0.2, 0.8}, {0.2, 0.8}})};
  s.b = PairMatrix(1, 1, 1.0);
  s.pi = PairMatrix(1, 1, pi);
  s.p = PairMatrix(1, 1, p);
  s.d = d;
  s.x0 = 0;
  return s;
}

inline ModelSpec m2(std::size_t d = 0) { return m1(d, 0.7); }

// Two symbols, two pre and two post Markov kernels.
inline ModelSpec m3(std::size_t d = 0) {
  ModelSpec s;
  s.alphabet_size = 2;
  s.pre_kernels = {Kernel::from_rows({{0.9, 0.1}, {0.7, 0.3}}),
                   Kernel::from_rows({{0.7, 0.3}, {0.8, 0.2}})};
  s.post_kernels = {Kernel::from_rows({{0.2, 0.8}, {0.1, 0.9}}),
                    Kernel::from_rows({{0.3, 0.7}, {0.4, 0.6}})};
  s.b = PairMatrix::from_rows({{0.25, 0.25}, {0.25, 0.25}});
  s.pi = PairMatrix::from_rows({{0.1, 0.05}, {0.0, 0.1}});
  s.p = PairMatrix::from_rows({{0.7, 0.75}, {0.65, 0.7}});
  s.d = d;
  s.x0 = 0;
  return s;
}

// Three symbols, two pre kernels, one post kernel.
inline ModelSpec m4(std::size_t d = 1) {
  ModelSpec s;
  s.alphabet_size = 3;
  s.pre_kernels = {Kernel::from_rows({{0.6, 0.3, 0.1}, {0.3, 0.5, 0.2}, {0.2, 0.3, 0.5}}),
                   Kernel::from_rows({{0.5, 0.4, 0.1}, {0.4, 0.4, 0.2}, {0.3, 0.3, 0.4}})};
  s.post_kernels = {Kernel::from_rows({{0.1, 0.3, 0.6}, {0.1, 0.2, 0.7}, {0.2, 0.2, 0.6}})};
  s.b = PairMatrix::from_rows({{0.6}, {0.4}});
  s.pi = PairMatrix::from_rows({{0.05}, {0.1}});
  s.p = PairMatrix::from_rows({{0.75}, {0.8}});
  s.d = d;
  s.x0 = 0;
  return s;
}

inline std::vector<ModelSpec> all_models(std::size_t d) { return {m1(d), m2(d), m3(d), m4(d)}; }

// Every path (x0, x_1..x_n) of depth n.
inline std::vector<std::vector<Symbol>> all_paths(const ModelSpec& spec, std::size_t n) {
  std::vector<std::vector<Symbol>> out{{spec.x0}};
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<std::vector<Symbol>> next;
    for (const auto& path : out) {
      for (Symbol y = 0; y < spec.alphabet_size; ++y) {
        next.push_back(path);
        next.back().push_back(y);
      }
    }
    out = std::move(next);
  }
  return out;
}

// A random path of length n + 1 drawn uniformly over symbols.
inline std::vector<Symbol> random_path(const ModelSpec& spec, std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<Symbol> pick(0, spec.alphabet_size - 1);
  std::vector<Symbol> path{spec.x0};
  for (std::size_t t = 0; t < n; ++t) path.push_back(pick(rng));
  return path;
}

// P(theta = t, X_1..X_n = path | beta = (i,j)) straight from the generative
// description, for t <= n + 1; t = n + 1 stands for every theta > n.
inline double pair_joint(const ModelSpec& s, const std::vector<Symbol>& path, std::size_t i,
                         std::size_t j, std::size_t t) {
  const std::size_t n = path.size() - 1;
  double prior = 0.0;
  if (t == n + 1) {
    prior = n == 0 ? 1.0 : (1.0 - s.pi(i, j)) * std::pow(s.p(i, j), double(n - 1));
  } else {
    prior = t == 1 ? s.pi(i, j) : (1.0 - s.pi(i, j)) * std::pow(s.p(i, j), double(t - 2)) * s.q(i, j);
  }
  double product = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    product *= r < t ? s.pre_kernels[i](path[r - 1], path[r]) : s.post_kernels[j](path[r - 1], path[r]);
  }
  return prior * product;
}

// P(theta <= n | beta, path) and P(beta | path) by direct Bayes.
struct BruteForcePosterior {
  PairMatrix pi;
  PairMatrix b;
};

inline BruteForcePosterior brute_force_posterior(const ModelSpec& s, const std::vector<Symbol>& path) {
  const std::size_t n = path.size() - 1;
  BruteForcePosterior out{PairMatrix(s.l0(), s.l1()), PairMatrix(s.l0(), s.l1())};
  double evidence = 0.0;
  for (std::size_t i = 0; i < s.l0(); ++i) {
    for (std::size_t j = 0; j < s.l1(); ++j) {
      double changed = 0.0, total = 0.0;
      for (std::size_t t = 1; t <= n + 1; ++t) {
        const double v = pair_joint(s, path, i, j, t);
        total += v;
        if (t <= n) changed += v;
      }
      out.pi(i, j) = total > 0.0 ? changed / total : 0.0;
      out.b(i, j) = s.b(i, j) * total;
      evidence += out.b(i, j);
    }
  }
  for (double& v : out.b.values()) v /= evidence;
  return out;
}

}  // namespace disorder::testing
