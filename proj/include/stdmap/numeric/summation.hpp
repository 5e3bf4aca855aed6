#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace stdmap::numeric {

// Kahan-Babuska (Neumaier) running sum.  The compensation term is exposed so
// that long orbit accumulations can be carried across calls.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double initial) : sum_(initial) {}

  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      compensation_ += (sum_ - t) + v;
    } else {
      compensation_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }

  [[nodiscard]] double value() const { return sum_ + compensation_; }
  [[nodiscard]] double leading() const { return sum_; }
  [[nodiscard]] double compensation() const { return compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Pairwise (tree) summation; the result depends only on the values and their
// order, never on how the work producing them was scheduled.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace stdmap::numeric
