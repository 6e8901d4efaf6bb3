#include "striplab/binomial.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "striplab/errors.hpp"

namespace striplab {

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double level) {
  if (trials == 0 || successes > trials) {
    throw Error(ErrorCode::kInvalidArgument, "clopper_pearson needs 0 <= x <= n, n >= 1");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence level must lie in (0, 1)");
  }
  const double alpha = 1.0 - level;
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  Interval ci;
  ci.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, alpha / 2.0);
  ci.high = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 1.0 - alpha / 2.0);
  return ci;
}

double hoeffding_half_width(std::uint64_t trials, double level) {
  if (trials == 0) return 1.0;
  return std::sqrt(std::log(2.0 / (1.0 - level)) / (2.0 * static_cast<double>(trials)));
}

double binomial_coefficient(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (!std::isfinite(result)) return result;
  }
  return std::round(result);
}

}  // namespace striplab
