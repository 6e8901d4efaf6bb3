#pragma once

#include <cstdint>

namespace striplab {

struct Interval {
  double low = 0.0;
  double high = 0.0;

  bool contains(double p) const noexcept { return low <= p && p <= high; }
};

// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double level);

// Half-width of the two-sided Hoeffding interval, √(ln(2/(1-level)) / (2n)).
double hoeffding_half_width(std::uint64_t trials, double level);

// C(n, k) as a double; saturates to +inf instead of overflowing.
double binomial_coefficient(std::uint64_t n, std::uint64_t k);

}  // namespace striplab
