#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace disorder {

/// Dense l0 x l1 array indexed by a (pre-change, post-change) kernel pair.
///
/// Holds the prior quantities (b, pi, p) as well as the filter outputs
/// (Pi_n, B_n). Storage is row-major so that `values()` enumerates pairs in
/// the (1,1), (1,2), ..., (l0,l1) order.
class PairMatrix {
 public:
  PairMatrix() = default;
  PairMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static PairMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const PairMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double sum() const;
  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const PairMatrix&, const PairMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Entrywise product; throws std::invalid_argument on a shape mismatch.
PairMatrix hadamard(const PairMatrix& a, const PairMatrix& b);

}  // namespace disorder
