#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <span>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "revlin/errors.hpp"
#include "revlin/rng.hpp"

namespace revlin {

// ---------------------------------------------------------------------------
// Chain specifications
// ---------------------------------------------------------------------------

/// Metropolis-Hastings type chain on [-1, 1] that holds its position with
/// probability 1 - |x| and otherwise redraws from the base law ν with density
/// c_a |x|^a, c_a = (a+1)/2. The observable is g(x) = sign(x)|x|^q.
///
/// Stationary law: π(dx) = θ^{-1}|x|^{-1} ν(dx), density (a/2)|x|^{a-1}, with
/// θ = (a+1)/a. Requires a > 0, q > 0 and 2q + a > 1 (the last keeps
/// ∫ g² x^{-2} dν finite, so the covariance sum converges).
class MHChainSpec {
 public:
  MHChainSpec(double nu_exponent, double g_exponent);

  double nu_exponent() const noexcept { return a_; }
  double g_exponent() const noexcept { return q_; }
  double theta() const noexcept { return (a_ + 1.0) / a_; }

  /// g(x) = sign(x)|x|^q; odd.
  double g(double x) const noexcept;

  /// (1-|x|)^k g(x) = E[g(γ_k) | γ_0 = x].
  double conditional_mean(double x, long k) const;

  friend bool operator==(const MHChainSpec&, const MHChainSpec&) = default;

 private:
  double a_;
  double q_;
};

/// Stationary AR(1) Gaussian chain γ_{k+1} = rγ_k + sqrt(1-r²) z_{k+1} with
/// unit variance, observed through g = Σ_l c_l H_l (probabilists' Hermite).
/// hermite_coeffs[0] is c_1.
class GaussianChainSpec {
 public:
  GaussianChainSpec(double autocorr, std::vector<double> hermite_coeffs);

  double autocorr() const noexcept { return r_; }
  const std::vector<double>& hermite_coeffs() const noexcept { return c_; }

  double g(double x) const noexcept;

  friend bool operator==(const GaussianChainSpec&, const GaussianChainSpec&) = default;

 private:
  double r_;
  std::vector<double> c_;
};

/// Random walk on Z_m with symmetric step law ν, observed through the real
/// function f(x) = Σ_j f̂(j) e^{2πijx/m}. f̂ must be conjugate-symmetric with
/// f̂(0) = 0. Ergodicity (ν̂(j) ≠ 1 for j ≠ 0) is not required to construct a
/// spec; sampling rejects non-ergodic walks.
class GroupWalkSpec {
 public:
  GroupWalkSpec(int modulus, std::vector<double> step_pmf,
                std::vector<std::complex<double>> fourier_coeffs);

  int modulus() const noexcept { return m_; }
  const std::vector<double>& step_pmf() const noexcept { return pmf_; }
  const std::vector<std::complex<double>>& fourier_coeffs() const noexcept { return fhat_; }

  /// ν̂(j) = Σ_x ν(x) cos(2πjx/m).
  double nu_hat(int j) const noexcept;
  bool is_ergodic() const noexcept;

  /// f over Z_m, precomputed at construction.
  const std::vector<double>& f_table() const noexcept { return table_; }

  friend bool operator==(const GroupWalkSpec& x, const GroupWalkSpec& y) {
    return x.m_ == y.m_ && x.pmf_ == y.pmf_ && x.fhat_ == y.fhat_;
  }

 private:
  int m_;
  std::vector<double> pmf_;
  std::vector<std::complex<double>> fhat_;
  std::vector<double> table_;
};

using ChainSpec = std::variant<MHChainSpec, GaussianChainSpec, GroupWalkSpec>;

/// Probabilists' Hermite polynomial H_k(x).
double hermite(int k, double x) noexcept;

// ---------------------------------------------------------------------------
// Spectral atoms of the group walk
// ---------------------------------------------------------------------------

struct SpectralAtom {
  double location;  ///< t in [-1, 1]
  double mass;      ///< w >= 0
};

struct SpectralAtoms {
  std::vector<SpectralAtom> atoms;  ///< sorted by location, distinct locations
  double total_mass() const noexcept;
};

/// Atoms (ν̂(j), |f̂(j)|²) for j = 1..m-1 with positive mass, merged by
/// location. Throws ConditionError if mass sits at t = 1.
SpectralAtoms spectral_atoms(const GroupWalkSpec& spec);

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Streaming sampler for the MH chain. start() draws γ from π; each step()
/// advances one transition. Both return ξ = g(γ).
///
/// A step consumes exactly one 64-bit word w: the high 32 bits give the
/// uniform for the hold test (redraw when u < |γ|), bit 0 the sign of a redraw
/// and bits 1..31 its magnitude uniform (resolution 2^-31).
class MHSampler {
 public:
  explicit MHSampler(const MHChainSpec& spec);

  double start(RandomStream& rng) noexcept;

  double step(RandomStream& rng) noexcept {
    const std::uint64_t w = rng.next_u64();
    const double u = static_cast<double>(static_cast<std::int64_t>(w >> 32)) * 0x1.0p-32;
    if (fast_) {
      // a = q = 1: ξ = γ, candidate computed unconditionally and selected by mask.
      double cand = std::sqrt(magnitude_uniform(w));
      std::uint64_t cb;
      std::uint64_t xb;
      std::memcpy(&cb, &cand, sizeof cb);
      std::memcpy(&xb, &xi_, sizeof xb);
      cb |= (w & 1U) << 63;
      const std::uint64_t mask = -static_cast<std::uint64_t>(u < std::fabs(xi_));
      xb = (cb & mask) | (xb & ~mask);
      std::memcpy(&xi_, &xb, sizeof xb);
      return xi_;
    }
    if (u < abs_state_) redraw(w);
    return xi_;
  }

  /// Calls sink(i, ξ) for count consecutive steps, i = 0..count-1; same
  /// values as repeated step().
  template <class Sink>
  void drive(RandomStream& rng, std::size_t count, Sink&& sink) noexcept {
    if (!fast_) {
      for (std::size_t i = 0; i < count; ++i) sink(i, step(rng));
      return;
    }
    RandomStream local = rng;
    double xi = xi_;
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t w = local.next_u64();
      const double u = static_cast<double>(static_cast<std::int64_t>(w >> 32)) * 0x1.0p-32;
      double cand = std::sqrt(magnitude_uniform(w));
      std::uint64_t cb;
      std::uint64_t xb;
      std::memcpy(&cb, &cand, sizeof cb);
      std::memcpy(&xb, &xi, sizeof xb);
      cb |= (w & 1U) << 63;
      const std::uint64_t mask = -static_cast<std::uint64_t>(u < std::fabs(xi));
      xb = (cb & mask) | (xb & ~mask);
      std::memcpy(&xi, &xb, sizeof xb);
      sink(i, xi);
    }
    xi_ = xi;
    rng = local;
  }

  double state() const noexcept { return fast_ ? xi_ : sign_ * abs_state_; }

 private:
  static double magnitude_uniform(std::uint64_t w) noexcept {
    return (static_cast<double>(static_cast<std::int64_t>((w & 0xFFFFFFFFULL) >> 1)) + 0.5) *
           0x1.0p-31;
  }
  void redraw(std::uint64_t w) noexcept;
  double observe() const noexcept;

  MHChainSpec spec_;
  double nu_power_;
  bool nu_is_sqrt_;
  bool g_is_identity_;
  bool fast_;
  double abs_state_ = 0.0;
  double sign_ = 1.0;
  double xi_ = 0.0;
};

class GaussianSampler {
 public:
  explicit GaussianSampler(const GaussianChainSpec& spec);

  double start(RandomStream& rng) noexcept {
    state_ = rng.normal();
    return spec_.g(state_);
  }

  double step(RandomStream& rng) noexcept {
    state_ = r_ * state_ + innovation_scale_ * rng.normal();
    return spec_.g(state_);
  }

  template <class Sink>
  void drive(RandomStream& rng, std::size_t count, Sink&& sink) noexcept {
    for (std::size_t i = 0; i < count; ++i) sink(i, step(rng));
  }

  double state() const noexcept { return state_; }

 private:
  GaussianChainSpec spec_;
  double r_;
  double innovation_scale_;
  double state_ = 0.0;
};

class GroupWalkSampler {
 public:
  /// Throws ConditionError for a non-ergodic walk.
  explicit GroupWalkSampler(const GroupWalkSpec& spec);

  double start(RandomStream& rng) noexcept {
    state_ = static_cast<int>(rng.below(static_cast<std::uint64_t>(m_)));
    return table_[static_cast<std::size_t>(state_)];
  }

  double step(RandomStream& rng) noexcept;

  template <class Sink>
  void drive(RandomStream& rng, std::size_t count, Sink&& sink) noexcept {
    for (std::size_t i = 0; i < count; ++i) sink(i, step(rng));
  }

  int state() const noexcept { return state_; }

 private:
  int m_;
  std::vector<double> table_;
  std::vector<int> steps_;
  std::vector<double> cumulative_;
  int state_ = 0;
};

/// Calls fn(sampler) with the concrete sampler for `chain`, so hot loops are
/// compiled per chain type.
template <class Fn>
decltype(auto) with_sampler(const ChainSpec& chain, Fn&& fn) {
  return std::visit(
      [&](const auto& spec) -> decltype(auto) {
        using Spec = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<Spec, MHChainSpec>) {
          MHSampler sampler(spec);
          return fn(sampler);
        } else if constexpr (std::is_same_v<Spec, GaussianChainSpec>) {
          GaussianSampler sampler(spec);
          return fn(sampler);
        } else {
          GroupWalkSampler sampler(spec);
          return fn(sampler);
        }
      },
      chain);
}

/// Stationary path ξ_{j_min}..ξ_{j_max}. Deterministic in (spec, range, rng state).
std::vector<double> sample_mh_path(const MHChainSpec& spec, long j_min, long j_max,
                                   RandomStream& rng);
std::vector<double> sample_gaussian_path(const GaussianChainSpec& spec, long j_min,
                                         long j_max, RandomStream& rng);
std::vector<double> sample_group_walk_path(const GroupWalkSpec& spec, long j_min,
                                           long j_max, RandomStream& rng);
std::vector<double> sample_path(const ChainSpec& chain, long j_min, long j_max,
                                RandomStream& rng);

/// MH conditional mean (1-|x|)^k g(x); DomainError for |x| > 1 or k < 0.
double mh_conditional_mean(const MHChainSpec& spec, double x, long k);

const char* chain_kind(const ChainSpec& chain) noexcept;

}  // namespace revlin
