#include "revlin/numeric.hpp"

#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace revlin {

double ordered_dot(std::span<const double> x, std::span<const double> y) noexcept {
  const std::size_t n = x.size() < y.size() ? x.size() : y.size();
  if (n <= kCompensationThreshold) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  }
  CompensatedSum total;
  for (std::size_t start = 0; start < n; start += kSummationBlock) {
    const std::size_t stop = start + kSummationBlock < n ? start + kSummationBlock : n;
    double block = 0.0;
    for (std::size_t i = start; i < stop; ++i) block += x[i] * y[i];
    total.add(block);
  }
  return total.value();
}

double log_beta(double a, double b) noexcept {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_fn(double a, double b) noexcept { return std::exp(log_beta(a, b)); }

double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double round_sig15(double x) noexcept {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace revlin
