#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "disorder/pair_matrix.hpp"

namespace disorder {

/// Observation symbols are indices into a finite alphabet 0..|E|-1.
using Symbol = std::size_t;

/// Row-stochastic transition matrix: `(*this)(x, y)` is the probability of
/// observing y next when the current observation is x.
class Kernel {
 public:
  Kernel() = default;
  explicit Kernel(std::size_t alphabet_size, double fill = 0.0);

  static Kernel from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t alphabet_size() const { return size_; }
  double operator()(Symbol from, Symbol to) const { return values_[from * size_ + to]; }
  double& operator()(Symbol from, Symbol to) { return values_[from * size_ + to]; }
  std::span<const double> row(Symbol from) const {
    return std::span<const double>(values_).subspan(from * size_, size_);
  }
  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<double> values_;
};

/// Latent variables of one realization: the change time and the kernel pair.
struct LatentState {
  std::size_t theta = 1;
  std::size_t beta1 = 0;
  std::size_t beta2 = 0;

  friend bool operator==(const LatentState&, const LatentState&) = default;
};

/// A complete problem instance.
///
/// `b(i,j)` is the prior probability of the kernel pair, `pi(i,j)` the
/// probability that the change happens at the first observation, and
/// `p(i,j)` the per-step continuation probability of the geometric change
/// time. The complementary hazard q = 1 - p is always derived on demand.
struct ModelSpec {
  std::size_t alphabet_size = 0;
  std::vector<Kernel> pre_kernels;
  std::vector<Kernel> post_kernels;
  PairMatrix b;
  PairMatrix pi;
  PairMatrix p;
  std::size_t d = 0;
  Symbol x0 = 0;

  std::size_t l0() const { return pre_kernels.size(); }
  std::size_t l1() const { return post_kernels.size(); }
  double q(std::size_t i, std::size_t j) const { return 1.0 - p(i, j); }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

inline constexpr double kStochasticTolerance = 1e-12;

/// Checks every modelling assumption; an empty report means the spec is usable.
ValidationReport validate(const ModelSpec& spec);

/// Throws ModelError listing all violations if the spec is invalid.
void require_valid(const ModelSpec& spec);

/// P(theta = k), k >= 1.
double theta_prior_pmf(const ModelSpec& spec, std::size_t k);

/// P(theta = n + k | beta = (i,j), theta > n), k >= 1.
double conditional_hazard(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t n,
                          std::size_t k);

/// P(theta > n + k | beta = (i,j), theta > n), k >= 1.
double conditional_survival(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t n,
                            std::size_t k);

}  // namespace disorder
