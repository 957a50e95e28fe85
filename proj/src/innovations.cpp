#include "revlin/innovations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace revlin {

namespace {

constexpr double kPmfTolerance = 1e-12;
constexpr double kErgodicityGap = 1e-12;
constexpr double kAtomMergeTolerance = 1e-12;

void check_range(long j_min, long j_max) {
  if (j_min > j_max) {
    throw DomainError("invalid path range: j_min " + std::to_string(j_min) + " > j_max " +
                      std::to_string(j_max));
  }
}

// cos(2πk/m) with the argument reduced to [0, m).
double unit_cos(long k, int m) {
  const long r = ((k % m) + m) % m;
  return std::cos(2.0 * std::numbers::pi * static_cast<double>(r) / m);
}

double unit_sin(long k, int m) {
  const long r = ((k % m) + m) % m;
  return std::sin(2.0 * std::numbers::pi * static_cast<double>(r) / m);
}

template <class Sampler>
std::vector<double> draw_path(Sampler& sampler, long j_min, long j_max, RandomStream& rng) {
  check_range(j_min, j_max);
  std::vector<double> xi(static_cast<std::size_t>(j_max - j_min + 1));
  xi[0] = sampler.start(rng);
  for (std::size_t i = 1; i < xi.size(); ++i) xi[i] = sampler.step(rng);
  return xi;
}

}  // namespace

// --- MH ---------------------------------------------------------------------

MHChainSpec::MHChainSpec(double nu_exponent, double g_exponent)
    : a_(nu_exponent), q_(g_exponent) {
  if (!(a_ > 0.0) || !std::isfinite(a_)) {
    throw DomainError("MH chain: nu exponent a must be finite and > 0");
  }
  if (!(q_ > 0.0) || !std::isfinite(q_)) {
    throw DomainError("MH chain: g exponent q must be finite and > 0");
  }
  if (!(2.0 * q_ + a_ - 1.0 > 0.0)) {
    throw DomainError("MH chain: need 2q + a > 1 for a finite integral of g^2 x^-2 against nu");
  }
}

double MHChainSpec::g(double x) const noexcept {
  const double mag = q_ == 1.0 ? std::abs(x) : std::pow(std::abs(x), q_);
  return std::signbit(x) ? -mag : mag;
}

double MHChainSpec::conditional_mean(double x, long k) const {
  return mh_conditional_mean(*this, x, k);
}

double mh_conditional_mean(const MHChainSpec& spec, double x, long k) {
  if (!(std::abs(x) <= 1.0)) throw DomainError("MH conditional mean: |x| must be <= 1");
  if (k < 0) throw DomainError("MH conditional mean: k must be >= 0");
  return std::pow(1.0 - std::abs(x), static_cast<double>(k)) * spec.g(x);
}

MHSampler::MHSampler(const MHChainSpec& spec)
    : spec_(spec),
      nu_power_(1.0 / (spec.nu_exponent() + 1.0)),
      nu_is_sqrt_(spec.nu_exponent() == 1.0),
      g_is_identity_(spec.g_exponent() == 1.0),
      fast_(nu_is_sqrt_ && g_is_identity_) {}

double MHSampler::start(RandomStream& rng) noexcept {
  // |γ| under π has CDF x^a on [0, 1].
  const std::uint64_t w = rng.next_u64();
  const double u = (static_cast<double>(w >> 11) + 1.0) * 0x1.0p-53;
  abs_state_ = spec_.nu_exponent() == 1.0 ? u : std::pow(u, 1.0 / spec_.nu_exponent());
  sign_ = (w & 1U) ? -1.0 : 1.0;
  xi_ = observe();
  return xi_;
}

void MHSampler::redraw(std::uint64_t w) noexcept {
  // |x| under ν has CDF x^{a+1} on [0, 1].
  const double u = magnitude_uniform(w);
  abs_state_ = nu_is_sqrt_ ? std::sqrt(u) : std::pow(u, nu_power_);
  sign_ = (w & 1U) ? -1.0 : 1.0;
  xi_ = observe();
}

double MHSampler::observe() const noexcept {
  const double mag = g_is_identity_ ? abs_state_ : std::pow(abs_state_, spec_.g_exponent());
  return sign_ * mag;
}

std::vector<double> sample_mh_path(const MHChainSpec& spec, long j_min, long j_max,
                                   RandomStream& rng) {
  MHSampler sampler(spec);
  return draw_path(sampler, j_min, j_max, rng);
}

// --- Gaussian -----------------------------------------------------------------

double hermite(int k, double x) noexcept {
  if (k <= 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int l = 1; l < k; ++l) {
    const double next = x * cur - l * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

GaussianChainSpec::GaussianChainSpec(double autocorr, std::vector<double> hermite_coeffs)
    : r_(autocorr), c_(std::move(hermite_coeffs)) {
  if (!(r_ > 0.0 && r_ < 1.0)) throw DomainError("Gaussian chain: r must lie in (0, 1)");
  if (c_.empty() || std::none_of(c_.begin(), c_.end(), [](double c) { return c != 0.0; })) {
    throw DomainError("Gaussian chain: at least one Hermite coefficient must be nonzero");
  }
  for (double c : c_) {
    if (!std::isfinite(c)) throw DomainError("Gaussian chain: Hermite coefficients must be finite");
  }
}

double GaussianChainSpec::g(double x) const noexcept {
  double prev = 1.0;
  double cur = x;
  double sum = c_[0] * cur;
  for (std::size_t l = 1; l < c_.size(); ++l) {
    const double next = x * cur - static_cast<double>(l) * prev;
    prev = cur;
    cur = next;
    sum += c_[l] * cur;
  }
  return sum;
}

GaussianSampler::GaussianSampler(const GaussianChainSpec& spec)
    : spec_(spec), r_(spec.autocorr()), innovation_scale_(std::sqrt(1.0 - r_ * r_)) {}

std::vector<double> sample_gaussian_path(const GaussianChainSpec& spec, long j_min, long j_max,
                                         RandomStream& rng) {
  GaussianSampler sampler(spec);
  return draw_path(sampler, j_min, j_max, rng);
}

// --- Group walk ---------------------------------------------------------------

GroupWalkSpec::GroupWalkSpec(int modulus, std::vector<double> step_pmf,
                             std::vector<std::complex<double>> fourier_coeffs)
    : m_(modulus), pmf_(std::move(step_pmf)), fhat_(std::move(fourier_coeffs)) {
  if (m_ < 2) throw DomainError("group walk: modulus must be >= 2");
  const auto m = static_cast<std::size_t>(m_);
  if (pmf_.size() != m) throw DomainError("group walk: step_pmf must have m entries");
  if (fhat_.size() != m) throw DomainError("group walk: fourier coefficients must have m entries");
  double total = 0.0;
  for (double p : pmf_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("group walk: step_pmf entries must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > kPmfTolerance) throw DomainError("group walk: step_pmf must sum to 1");
  for (std::size_t x = 1; x < m; ++x) {
    if (std::abs(pmf_[x] - pmf_[m - x]) > kPmfTolerance) {
      throw DomainError("group walk: step_pmf must be symmetric, nu(x) = nu(m-x)");
    }
  }
  if (std::abs(fhat_[0]) > kPmfTolerance) throw DomainError("group walk: fhat(0) must be 0");
  for (std::size_t j = 1; j < m; ++j) {
    if (std::abs(fhat_[j] - std::conj(fhat_[m - j])) > kPmfTolerance) {
      throw DomainError("group walk: fourier coefficients must be conjugate-symmetric");
    }
  }
  table_.assign(m, 0.0);
  for (int x = 0; x < m_; ++x) {
    double value = 0.0;
    for (int j = 1; j < m_; ++j) {
      const long k = static_cast<long>(j) * x;
      value += fhat_[static_cast<std::size_t>(j)].real() * unit_cos(k, m_) -
               fhat_[static_cast<std::size_t>(j)].imag() * unit_sin(k, m_);
    }
    table_[static_cast<std::size_t>(x)] = value;
  }
}

double GroupWalkSpec::nu_hat(int j) const noexcept {
  double sum = 0.0;
  for (int x = 0; x < m_; ++x) {
    sum += pmf_[static_cast<std::size_t>(x)] * unit_cos(static_cast<long>(j) * x, m_);
  }
  return sum;
}

bool GroupWalkSpec::is_ergodic() const noexcept {
  for (int j = 1; j < m_; ++j) {
    if (std::abs(1.0 - nu_hat(j)) <= kErgodicityGap) return false;
  }
  return true;
}

GroupWalkSampler::GroupWalkSampler(const GroupWalkSpec& spec)
    : m_(spec.modulus()), table_(spec.f_table()) {
  if (!spec.is_ergodic()) throw ConditionError("group walk is not ergodic: nu_hat(j) = 1 for some j != 0");
  double running = 0.0;
  for (int x = 0; x < m_; ++x) {
    const double p = spec.step_pmf()[static_cast<std::size_t>(x)];
    if (p > 0.0) {
      running += p;
      steps_.push_back(x);
      cumulative_.push_back(running);
    }
  }
  cumulative_.back() = 1.0;
}

double GroupWalkSampler::step(RandomStream& rng) noexcept {
  const double u = rng.uniform();
  std::size_t k = 0;
  while (k + 1 < cumulative_.size() && u >= cumulative_[k]) ++k;
  state_ += steps_[k];
  if (state_ >= m_) state_ -= m_;
  return table_[static_cast<std::size_t>(state_)];
}

std::vector<double> sample_group_walk_path(const GroupWalkSpec& spec, long j_min, long j_max,
                                           RandomStream& rng) {
  check_range(j_min, j_max);
  GroupWalkSampler sampler(spec);
  return draw_path(sampler, j_min, j_max, rng);
}

std::vector<double> sample_path(const ChainSpec& chain, long j_min, long j_max,
                                RandomStream& rng) {
  check_range(j_min, j_max);
  return with_sampler(chain, [&](auto& sampler) { return draw_path(sampler, j_min, j_max, rng); });
}

double SpectralAtoms::total_mass() const noexcept {
  double total = 0.0;
  for (const auto& atom : atoms) total += atom.mass;
  return total;
}

SpectralAtoms spectral_atoms(const GroupWalkSpec& spec) {
  std::vector<SpectralAtom> raw;
  for (int j = 1; j < spec.modulus(); ++j) {
    const double mass = std::norm(spec.fourier_coeffs()[static_cast<std::size_t>(j)]);
    if (mass <= 0.0) continue;
    const double t = std::clamp(spec.nu_hat(j), -1.0, 1.0);
    if (1.0 - t <= kErgodicityGap) {
      throw ConditionError("spectral mass at t = 1 (character " + std::to_string(j) +
                           "): walk is not ergodic for this observable");
    }
    raw.push_back({t, mass});
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const SpectralAtom& x, const SpectralAtom& y) { return x.location < y.location; });
  SpectralAtoms out;
  for (const auto& atom : raw) {
    if (!out.atoms.empty() &&
        std::abs(out.atoms.back().location - atom.location) <= kAtomMergeTolerance) {
      out.atoms.back().mass += atom.mass;
    } else {
      out.atoms.push_back(atom);
    }
  }
  return out;
}

const char* chain_kind(const ChainSpec& chain) noexcept {
  switch (chain.index()) {
    case 0: return "mh";
    case 1: return "gaussian";
    default: return "group";
  }
}

}  // namespace revlin
