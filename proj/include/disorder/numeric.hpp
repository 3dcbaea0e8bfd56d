#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace disorder {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// base^exponent for small integer arguments, throwing-free; saturates at SIZE_MAX.
inline std::size_t saturating_pow(std::size_t base, std::size_t exponent) {
  std::size_t out = 1;
  for (std::size_t k = 0; k < exponent; ++k) {
    if (base != 0 && out > SIZE_MAX / base) return SIZE_MAX;
    out *= base;
  }
  return out;
}

}  // namespace disorder
