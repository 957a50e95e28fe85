#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace revlin {

/// Neumaier's variant of Kahan summation. The running value is hi + lo and
/// behaves like a double-double accumulator for sums of same-sign terms.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = hi_ + x;
    if (std::abs(hi_) >= std::abs(x)) {
      lo_ += (hi_ - t) + x;
    } else {
      lo_ += (x - t) + hi_;
    }
    hi_ = t;
  }
  double hi() const noexcept { return hi_; }
  double lo() const noexcept { return lo_; }
  double value() const noexcept { return hi_ + lo_; }

 private:
  double hi_ = 0.0;
  double lo_ = 0.0;
};

/// Difference of two compensated accumulators, (a.hi - b.hi) + (a.lo - b.lo).
inline double difference(const CompensatedSum& a, const CompensatedSum& b) noexcept {
  return (a.hi() - b.hi()) + (a.lo() - b.lo());
}

/// Windows longer than this are accumulated blockwise with compensation.
inline constexpr std::size_t kCompensationThreshold = 1'000'000;
inline constexpr std::size_t kSummationBlock = 4096;

/// Fixed-order dot product. Plain ascending accumulation for short inputs;
/// above kCompensationThreshold terms, plain sums over consecutive blocks of
/// kSummationBlock are combined with CompensatedSum.
double ordered_dot(std::span<const double> x, std::span<const double> y) noexcept;

/// ln B(a, b) via lgamma.
double log_beta(double a, double b) noexcept;

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
double beta_fn(double a, double b) noexcept;

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// Round to 15 significant decimal digits (the precision used in reports).
double round_sig15(double x) noexcept;

}  // namespace revlin
