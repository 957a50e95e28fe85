#pragma once

#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "revlin/errors.hpp"
#include "revlin/numeric.hpp"

namespace revlin {

// Coefficient families (a_i). All are causal: a_i = 0 for i < first_index().

/// a_i = i^{-α} for i >= 1, α in (1/2, 1).
struct PowerLaw {
  double alpha;
};
/// a_i = Γ(i+d)/(Γ(d)Γ(i+1)) for i >= 0, d in (0, 1/2).
struct FracInt {
  double d;
};
/// a_0 = 1, a_i = (i+1)^{-α} - i^{-α} for i >= 1, α in (0, 1/2). The partial
/// sums telescope to A_m = (m+1)^{-α}.
struct PowerDiff {
  double alpha;
};
/// a_i = i^{-1/2} (log i)^{-α} for i >= 2, α > 1/2.
struct LogPower {
  double alpha;
};
/// a_i = scale * ratio^i for i >= 0, ratio in (0, 1), scale > 0.
struct Geometric {
  double ratio;
  double scale = 1.0;
};
/// a_1 = 1, zero elsewhere.
struct Delta {};

class CoefficientFamily {
 public:
  using Variant = std::variant<PowerLaw, FracInt, PowerDiff, LogPower, Geometric, Delta>;

  /// Validates the parameter range; DomainError on violation.
  CoefficientFamily(Variant v);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires(std::is_constructible_v<Variant, T> && !std::is_same_v<std::decay_t<T>, Variant>)
  CoefficientFamily(T v) : CoefficientFamily(Variant(std::move(v))) {}  // NOLINT

  const Variant& variant() const noexcept { return v_; }

  /// "power_law", "frac_int", "power_diff", "log_power", "geometric", "delta".
  std::string name() const;

  /// First index with a_i possibly nonzero.
  long first_index() const noexcept;

  /// Regular-variation exponent of b_n²: PowerLaw 3-2α, FracInt 2d+1,
  /// PowerDiff 1-2α, LogPower 2, Geometric and Delta 1.
  double beta() const noexcept;

  /// Σ_i |a_i| < ∞ and the family is accepted by abs_sum().
  bool summable() const noexcept;

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&v_);
  }

  friend bool operator==(const CoefficientFamily& x, const CoefficientFamily& y);

 private:
  Variant v_;
};

/// a_i; zero outside the support. FracInt uses the product recurrence
/// a_{i+1} = a_i (i+d)/(i+1).
double coeff(const CoefficientFamily& family, long i);

/// A = Σ_i a_i for Geometric and Delta; DomainError for the other variants.
double abs_sum(const CoefficientFamily& family);

/// Streams b_{n,j} = a_{j+1} + ... + a_{j+n} for j = first_j(), first_j()+1, ...
///
/// Families with closed-form partial sums (PowerDiff, Geometric, Delta)
/// evaluate A_{j+n} - A_j directly in a cancellation-free form. The others keep
/// two compensated running sums, A_{j+n} and A_j, and difference them.
class WeightStream {
 public:
  WeightStream(const CoefficientFamily& family, long n);

  long first_j() const noexcept { return first_j_; }
  long next_j() const noexcept { return j_; }
  double next();

 private:
  double term(long i);

  CoefficientFamily family_;
  long n_;
  long first_j_;
  long j_;
  // running sums for PowerLaw / FracInt / LogPower
  CompensatedSum lead_;
  CompensatedSum lag_;
  long lead_index_;
  long lag_index_;
  double frac_lead_ = 0.0;  // FracInt a_i at the lead / lag index
  double frac_lag_ = 0.0;
};

/// Certified upper bound on Σ_{j > j_max} b_{n,j}², from b_{n,j} <= n a_{j+1}
/// (monotone coefficients) and an integral comparison per variant.
double weight_tail_bound(const CoefficientFamily& family, long n, long j_max);

struct WindowOptions {
  /// Hard cap on the number of retained window entries.
  long max_window = 1L << 27;
};

/// Materialized b_{n,j} on [j_min, j_max].
struct WeightProfile {
  long n = 0;
  long j_min = 0;
  long j_max = -1;
  std::vector<double> weights;  ///< weights[j - j_min] = b_{n,j}
  double bn2 = 0.0;             ///< Σ of retained b_{n,j}²
  double tail_bound = 0.0;      ///< certified bound on the excluded mass
  double tail_fraction = 0.0;   ///< tail_bound / bn2

  long size() const noexcept { return j_max - j_min + 1; }
  double bn() const;
  /// b_{n,j}, zero outside the window.
  double at(long j) const noexcept;
};

/// Window [first_index - n, j_max] with certified excluded mass
/// Σ_{j > j_max} b_{n,j}² <= eps * bn2. TruncationError when no such window
/// fits within options.max_window.
WeightProfile weight_profile(const CoefficientFamily& family, long n, double eps,
                             const WindowOptions& options = {});

/// Writes "j,b" rows.
std::string weight_profile_csv(const WeightProfile& profile);

/// Exact b_n² = Σ_{|h|<n} (n-|h|) r(h) where r(h) = Σ_i a_i a_{i+h} has a
/// closed form (FracInt, Geometric, Delta). Empty for the other variants.
std::optional<double> bn2_exact(const CoefficientFamily& family, long n);

/// b_n² for diagnostics: exact when available, otherwise the certified
/// window sum plus half its tail bound (the true value lies within
/// ± tail_bound/2 of the result).
double bn2_value(const CoefficientFamily& family, long n, double eps = 1e-4,
                 const WindowOptions& options = {});

struct RegVarRow {
  double t;
  double ratio;      ///< b_{[nt]}² / b_n²
  double reference;  ///< t^β
};

struct RegVarDiagnostic {
  long n = 0;
  double beta = 0.0;
  std::vector<RegVarRow> rows;
  std::vector<long> fit_n;        ///< dyadic grid used by the slope fit
  double fitted_slope = 0.0;      ///< least-squares slope of log b_n² on log n
};

RegVarDiagnostic regvar_diagnostic(const CoefficientFamily& family, long n,
                                   std::span<const double> t_grid, double eps = 1e-4,
                                   const WindowOptions& options = {});

}  // namespace revlin
