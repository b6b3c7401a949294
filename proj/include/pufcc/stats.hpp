#pragma once

#include <cstdint>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace pufcc {

struct BinomialCi {
  double low;
  double high;
};

// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
// proportion.
inline BinomialCi clopper_pearson(std::uint64_t successes, std::uint64_t trials,
                                  double confidence = 0.95) {
  if (trials == 0) throw std::invalid_argument("clopper_pearson: trials must be > 0");
  if (successes > trials) throw std::invalid_argument("clopper_pearson: successes > trials");
  const double alpha = 1.0 - confidence;
  const double x = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  BinomialCi ci;
  ci.low = (successes == 0) ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, alpha / 2.0);
  ci.high = (successes == trials) ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 1.0 - alpha / 2.0);
  return ci;
}

inline bool intervals_overlap(const BinomialCi& a, const BinomialCi& b) {
  return a.low <= b.high && b.low <= a.high;
}

}  // namespace pufcc
