#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "revlin/coefficients.hpp"
#include "revlin/errors.hpp"
#include "revlin/innovations.hpp"

namespace revlin {

/// Exact covariance function k -> cov(ξ_0, ξ_k) of a chain observable,
/// with a certified bound on Σ_{k >= K} |cov(k)|.
///
///  - MHClosedForm: cov(k) = a B(2q+a, k+1).
///  - HermiteClosedForm: cov(k) = Σ_l c_l² l! r^{lk}.
///  - GroupAtoms: cov(k) = Σ_i w_i t_i^{|k|} over the spectral atoms.
class CovarianceModel {
 public:
  enum class Kind { MHClosedForm, HermiteClosedForm, GroupAtoms };

  static CovarianceModel from_chain(const ChainSpec& chain);
  static CovarianceModel mh(const MHChainSpec& spec);
  static CovarianceModel hermite(const GaussianChainSpec& spec);
  static CovarianceModel group_atoms(SpectralAtoms atoms);

  Kind kind() const noexcept { return kind_; }
  const char* kind_name() const noexcept;

  /// cov(ξ_0, ξ_k); symmetric in k.
  double cov(long k) const;

  /// Certified upper bound on Σ_{k >= K} |cov(k)|; +inf if not summable.
  /// MH: B(s, k+1) <= Γ(s)(k+1)^{-s} for s = 2q+a >= 1, then an integral
  /// comparison. Hermite: exact geometric tails. Atoms: Σ w|t|^K / (1-|t|).
  double abs_tail_bound(long K) const;

  bool summable() const;

  /// Spectral atoms (t, w) when the spectral measure is discrete (Hermite and
  /// group walks). The MH spectral measure has a density and returns null.
  const SpectralAtoms* atoms() const noexcept;

  const std::optional<MHChainSpec>& mh_spec() const noexcept { return mh_; }

 private:
  CovarianceModel() = default;

  Kind kind_ = Kind::GroupAtoms;
  std::optional<MHChainSpec> mh_;
  SpectralAtoms atoms_;  // Hermite: t = r^l, w = c_l² l!
};

// --- closed forms ------------------------------------------------------------

/// a B(2q+a, k+1).
double mh_cov(const MHChainSpec& spec, long k);

/// a [2/(2q+a-1) - 1/(2q+a)] = cov(0) + 2 Σ_{k>=1} cov(k).
double mh_sigma2(const MHChainSpec& spec);

/// θ^{-1}(∫g²|x|^{-1}dν + 2∫g²|x|^{-2}dν) = a [1/(2q+a) + 2/(2q+a-1)].
/// A competing closed form for the limit variance. It differs from
/// mh_sigma2 by 2 cov(0) and is rejected by Monte Carlo; reports carry it so
/// the comparison is visible.
double mh_eta_alternative(const MHChainSpec& spec);

/// Σ_l c_l² l! r^{kl}.
double hermite_cov(const GaussianChainSpec& spec, long k);

/// 2πf(0) = cov(0) + 2 Σ_{k>=1} cov(k). Series models are truncated at the
/// first K whose certified remainder 2 Σ_{k>=K}|cov(k)| is below tol; atom
/// models use Σ_i w_i (1+t_i)/(1-t_i). ConditionError when the tail bound
/// cannot reach tol within 10^9 terms.
double cov_sum_f0(const CovarianceModel& model, double tol = 1e-12);

/// 2πh(0), h the spectral density of ζ_k = ξ_k + ξ_{k+1}. Since
/// h(λ) = |1 + e^{iλ}|² f(λ), this is Σ_k cov(ζ_0, ζ_k) = Σ_i 4 w_i (1+t_i)/(1-t_i);
/// atoms at t = -1 contribute 0. ConditionError on an atom at t = 1.
double group_2pi_h0(const SpectralAtoms& atoms);

/// Σ_{k∈Z} ∫ t^{|k|} (1+t)² dρ_g = Σ_i w_i (1+t_i)³/(1-t_i): the sum of the
/// projected terms <Q^{k+j}g + Q^{k+j+1}g, Q^j g + Q^{j+1}g> at j = 0. Not a
/// variance; reported next to group_2pi_h0 for comparison.
double blocked_projection_sum(const SpectralAtoms& atoms);

/// Γ_j = Σ_{k >= 2j} |cov(k)|. Closed forms for MH (a B(2q+a-1, 2j+1)) and
/// Hermite; atoms go through gamma_j_series.
double gamma_j(const CovarianceModel& model, long j, double tol = 1e-14);

/// Γ_j by direct summation with certified truncation.
double gamma_j_series(const CovarianceModel& model, long j, double tol = 1e-14);

/// Γ_1, ..., Γ_p. Atom models with mass at negative t sum one series at j = p
/// and recurse downwards.
std::vector<double> gamma_sequence(const CovarianceModel& model, long p);

/// (1/p) Σ_{j=1}^p Γ_j.
double cesaro_gamma(const CovarianceModel& model, long p);

/// Var(Σ_j d_j ξ_j). Atom models: exact O(N) recursion per atom. MH: lags
/// truncated at L with 2 Σ_{k>L}|cov(k)| <= rel_tol, so the error is at most
/// rel_tol · Σ d_j².
double quadratic_form_variance(std::span<const double> d, const CovarianceModel& model,
                               double rel_tol = 1e-6);

/// (σ²/2)(s^β + t^β - |t-s|^β) with σ² = 2πf(0).
double fbm_cov(double s, double t, double beta, double sigma2);

/// Σ_{|k|<n} (1 - |k|/n) cov(k) = Var(Σ_{k=1}^n ξ_k)/n.
double finite_n_variance_ratio(const CovarianceModel& model, long n);

// --- reports -------------------------------------------------------------------

struct ConditionResult {
  std::string name;  ///< "abscov", "SR", "G1", "Mgen"
  bool passed = false;
  double value = 0.0;   ///< the sum / integral, or the last Cesàro mean
  double margin = 0.0;  ///< certified tail bound or trend ratio, per condition
  std::string note;
};

struct ConditionReport {
  std::vector<ConditionResult> results;
  bool all_passed() const noexcept;
  const ConditionResult* find(const std::string& name) const noexcept;
};

/// Evaluates abscov, SR, Mgen for every model and G1 when atoms are given
/// (defaults to the model's own atoms for group walks). Never throws for a
/// failed condition.
ConditionReport check_conditions(const CovarianceModel& model,
                                 const std::optional<SpectralAtoms>& atoms = std::nullopt);

struct LimitTargets {
  double sigma2 = 0.0;                    ///< σ_g² = 2πf(0)
  double two_pi_h0 = 0.0;                 ///< blocked sequence, = 4 sigma2
  std::optional<double> blocked_projection;  ///< atom models, see blocked_projection_sum
  std::optional<double> beta;             ///< when a family is given
  std::optional<double> hurst;            ///< β/2
  std::optional<double> abs_sum;          ///< A for summable families
  std::optional<double> eta_alternative;  ///< MH only, see mh_eta_alternative
};

LimitTargets limit_targets(const ChainSpec& chain,
                           const std::optional<CoefficientFamily>& family = std::nullopt);

}  // namespace revlin
