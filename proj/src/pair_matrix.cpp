#include "disorder/pair_matrix.hpp"

#include <numeric>
#include <stdexcept>

namespace disorder {

PairMatrix::PairMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

PairMatrix PairMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw std::invalid_argument("pair matrix must have at least one row and column");
  }
  PairMatrix out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != out.cols_) {
      throw std::invalid_argument("pair matrix rows have unequal length");
    }
    for (std::size_t j = 0; j < out.cols_; ++j) out(i, j) = rows[i][j];
  }
  return out;
}

double PairMatrix::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

std::vector<std::vector<double>> PairMatrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_, std::vector<double>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

PairMatrix hadamard(const PairMatrix& a, const PairMatrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("hadamard: shape mismatch");
  PairMatrix out(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.size(); ++k) out.values()[k] = a.values()[k] * b.values()[k];
  return out;
}

}  // namespace disorder
