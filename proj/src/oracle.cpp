#include "revlin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

#include "revlin/numeric.hpp"

namespace revlin {

namespace {

constexpr long kMaxSeriesTerms = 1'000'000'000;
constexpr double kInf = std::numeric_limits<double>::infinity();

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double mh_s(const MHChainSpec& spec) { return 2.0 * spec.g_exponent() + spec.nu_exponent(); }

void check_atoms(const SpectralAtoms& atoms) {
  for (const auto& atom : atoms.atoms) {
    if (atom.mass > 0.0 && atom.location >= 1.0) {
      throw ConditionError("spectral atom at t = 1: covariance sum diverges");
    }
  }
}

// Smallest K >= lo with model.abs_tail_bound(K) <= target, by doubling and
// bisection. ConditionError if none below kMaxSeriesTerms.
long tail_cutoff(const CovarianceModel& model, long lo, double target) {
  if (model.abs_tail_bound(lo) <= target) return lo;
  long hi = std::max(1L, 2 * lo);
  while (model.abs_tail_bound(hi) > target) {
    if (hi >= kMaxSeriesTerms) {
      throw ConditionError("covariance tail bound does not reach the requested tolerance within " +
                           std::to_string(kMaxSeriesTerms) + " terms");
    }
    lo = hi;
    hi = std::min(kMaxSeriesTerms, 2 * hi);
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (model.abs_tail_bound(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Calls fn(k, cov(k)) for k in [k0, k1), using the MH ratio recurrence
// cov(k+1) = cov(k) (k+1)/(k+1+s) where applicable.
template <class Fn>
void for_each_cov(const CovarianceModel& model, long k0, long k1, Fn&& fn) {
  if (k0 >= k1) return;
  if (model.kind() == CovarianceModel::Kind::MHClosedForm) {
    const double s = mh_s(*model.mh_spec());
    double c = model.cov(k0);
    for (long k = k0; k < k1; ++k) {
      fn(k, c);
      c *= static_cast<double>(k + 1) / (static_cast<double>(k + 1) + s);
    }
    return;
  }
  const auto atoms = *model.atoms();
  std::vector<double> power(atoms.atoms.size());
  for (std::size_t i = 0; i < atoms.atoms.size(); ++i) {
    power[i] = std::pow(atoms.atoms[i].location, static_cast<double>(k0));
  }
  for (long k = k0; k < k1; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < atoms.atoms.size(); ++i) {
      c += atoms.atoms[i].mass * power[i];
      power[i] *= atoms.atoms[i].location;
    }
    fn(k, c);
  }
}

}  // namespace

// --- CovarianceModel ---------------------------------------------------------

CovarianceModel CovarianceModel::from_chain(const ChainSpec& chain) {
  return std::visit(
      [](const auto& spec) {
        using Spec = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<Spec, MHChainSpec>) {
          return CovarianceModel::mh(spec);
        } else if constexpr (std::is_same_v<Spec, GaussianChainSpec>) {
          return CovarianceModel::hermite(spec);
        } else {
          return CovarianceModel::group_atoms(spectral_atoms(spec));
        }
      },
      chain);
}

CovarianceModel CovarianceModel::mh(const MHChainSpec& spec) {
  CovarianceModel model;
  model.kind_ = Kind::MHClosedForm;
  model.mh_ = spec;
  return model;
}

CovarianceModel CovarianceModel::hermite(const GaussianChainSpec& spec) {
  CovarianceModel model;
  model.kind_ = Kind::HermiteClosedForm;
  const auto& c = spec.hermite_coeffs();
  for (std::size_t l = 0; l < c.size(); ++l) {
    const int order = static_cast<int>(l) + 1;
    if (c[l] == 0.0) continue;
    model.atoms_.atoms.push_back(
        {std::pow(spec.autocorr(), order), c[l] * c[l] * factorial(order)});
  }
  std::sort(model.atoms_.atoms.begin(), model.atoms_.atoms.end(),
            [](const SpectralAtom& x, const SpectralAtom& y) { return x.location < y.location; });
  return model;
}

CovarianceModel CovarianceModel::group_atoms(SpectralAtoms atoms) {
  CovarianceModel model;
  model.kind_ = Kind::GroupAtoms;
  model.atoms_ = std::move(atoms);
  return model;
}

const char* CovarianceModel::kind_name() const noexcept {
  switch (kind_) {
    case Kind::MHClosedForm: return "mh_closed_form";
    case Kind::HermiteClosedForm: return "hermite_closed_form";
    default: return "group_atoms";
  }
}

double CovarianceModel::cov(long k) const {
  k = k < 0 ? -k : k;
  if (kind_ == Kind::MHClosedForm) return mh_cov(*mh_, k);
  double c = 0.0;
  for (const auto& atom : atoms_.atoms) {
    c += atom.mass * std::pow(atom.location, static_cast<double>(k));
  }
  return c;
}

double CovarianceModel::abs_tail_bound(long K) const {
  K = std::max(K, 0L);
  if (kind_ == Kind::MHClosedForm) {
    const double a = mh_->nu_exponent();
    const double s = mh_s(*mh_);
    if (K == 0) return cov(0) + abs_tail_bound(1);
    return a * std::tgamma(s) * std::pow(static_cast<double>(K), 1.0 - s) / (s - 1.0);
  }
  double bound = 0.0;
  for (const auto& atom : atoms_.atoms) {
    const double t = std::abs(atom.location);
    if (atom.mass <= 0.0) continue;
    if (t >= 1.0) return kInf;
    bound += atom.mass * std::pow(t, static_cast<double>(K)) / (1.0 - t);
  }
  return bound;
}

bool CovarianceModel::summable() const { return std::isfinite(abs_tail_bound(0)); }

const SpectralAtoms* CovarianceModel::atoms() const noexcept {
  if (kind_ == Kind::MHClosedForm) return nullptr;
  return &atoms_;
}

// --- closed forms ---------------------------------------------------------------

double mh_cov(const MHChainSpec& spec, long k) {
  if (k < 0) k = -k;
  return spec.nu_exponent() * boost::math::beta(mh_s(spec), static_cast<double>(k) + 1.0);
}

double mh_sigma2(const MHChainSpec& spec) {
  const double a = spec.nu_exponent();
  const double s = mh_s(spec);
  return a * (2.0 / (s - 1.0) - 1.0 / s);
}

double mh_eta_alternative(const MHChainSpec& spec) {
  const double a = spec.nu_exponent();
  const double s = mh_s(spec);
  return a * (1.0 / s + 2.0 / (s - 1.0));
}

double hermite_cov(const GaussianChainSpec& spec, long k) {
  if (k < 0) k = -k;
  const auto& c = spec.hermite_coeffs();
  double total = 0.0;
  for (std::size_t l = 0; l < c.size(); ++l) {
    const int order = static_cast<int>(l) + 1;
    total += c[l] * c[l] * factorial(order) *
             std::pow(spec.autocorr(), static_cast<double>(order) * static_cast<double>(k));
  }
  return total;
}

double cov_sum_f0(const CovarianceModel& model, double tol) {
  if (model.kind() == CovarianceModel::Kind::GroupAtoms) {
    const auto atoms = *model.atoms();
    check_atoms(atoms);
    double total = 0.0;
    for (const auto& atom : atoms.atoms) {
      total += atom.mass * (1.0 + atom.location) / (1.0 - atom.location);
    }
    return total;
  }
  if (!model.summable()) throw ConditionError("cov_sum_f0: covariances are not summable");
  const long K = tail_cutoff(model, 1, 0.5 * tol);
  CompensatedSum total;
  for_each_cov(model, 0, K, [&](long k, double c) { total.add(k == 0 ? c : 2.0 * c); });
  return total.value();
}

double group_2pi_h0(const SpectralAtoms& atoms) {
  check_atoms(atoms);
  double total = 0.0;
  for (const auto& atom : atoms.atoms) {
    total += 4.0 * atom.mass * (1.0 + atom.location) / (1.0 - atom.location);
  }
  return total;
}

double blocked_projection_sum(const SpectralAtoms& atoms) {
  check_atoms(atoms);
  double total = 0.0;
  for (const auto& atom : atoms.atoms) {
    const double up = 1.0 + atom.location;
    total += atom.mass * up * up * up / (1.0 - atom.location);
  }
  return total;
}

double gamma_j(const CovarianceModel& model, long j, double tol) {
  if (j < 0) throw DomainError("gamma_j: j must be >= 0");
  switch (model.kind()) {
    case CovarianceModel::Kind::MHClosedForm: {
      // Σ_{k>=K} a ∫ x^{s-1}(1-x)^k dx = a ∫ x^{s-2}(1-x)^K dx.
      const auto& spec = *model.mh_spec();
      return spec.nu_exponent() *
             boost::math::beta(mh_s(spec) - 1.0, 2.0 * static_cast<double>(j) + 1.0);
    }
    case CovarianceModel::Kind::HermiteClosedForm: {
      // every term is nonnegative: Σ_l w_l t_l^{2j} / (1 - t_l)
      double total = 0.0;
      for (const auto& atom : model.atoms()->atoms) {
        total += atom.mass * std::pow(atom.location, 2.0 * static_cast<double>(j)) /
                 (1.0 - atom.location);
      }
      return total;
    }
    default: {
      const auto& atoms = model.atoms()->atoms;
      const bool nonnegative = std::all_of(atoms.begin(), atoms.end(),
                                           [](const SpectralAtom& a) { return a.location >= 0.0; });
      if (!nonnegative) return gamma_j_series(model, j, tol);
      if (!model.summable()) throw ConditionError("gamma_j: covariances are not absolutely summable");
      double total = 0.0;
      for (const auto& atom : atoms) {
        total += atom.mass * std::pow(atom.location, 2.0 * static_cast<double>(j)) /
                 (1.0 - atom.location);
      }
      return total;
    }
  }
}

double gamma_j_series(const CovarianceModel& model, long j, double tol) {
  if (j < 0) throw DomainError("gamma_j: j must be >= 0");
  if (!model.summable()) throw ConditionError("gamma_j: covariances are not absolutely summable");
  const long start = 2 * j;
  const long K = tail_cutoff(model, start, tol);
  CompensatedSum total;
  for_each_cov(model, start, K, [&](long, double c) { total.add(std::abs(c)); });
  return total.value();
}

std::vector<double> gamma_sequence(const CovarianceModel& model, long p) {
  if (p < 1) throw DomainError("gamma_sequence: p must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(p));
  if (model.kind() != CovarianceModel::Kind::GroupAtoms) {
    for (long j = 1; j <= p; ++j) out[static_cast<std::size_t>(j - 1)] = gamma_j(model, j);
    return out;
  }
  // One series at j = p, then Γ_j = Γ_{j+1} + |cov(2j)| + |cov(2j+1)| downwards.
  double g = gamma_j(model, p);
  out[static_cast<std::size_t>(p - 1)] = g;
  for (long j = p - 1; j >= 1; --j) {
    g += std::abs(model.cov(2 * j)) + std::abs(model.cov(2 * j + 1));
    out[static_cast<std::size_t>(j - 1)] = g;
  }
  return out;
}

double cesaro_gamma(const CovarianceModel& model, long p) {
  const std::vector<double> gamma = gamma_sequence(model, p);
  CompensatedSum total;
  for (double g : gamma) total.add(g);
  return total.value() / static_cast<double>(p);
}

double quadratic_form_variance(std::span<const double> d, const CovarianceModel& model,
                               double rel_tol) {
  const std::size_t n = d.size();
  if (n == 0) return 0.0;
  if (const auto atoms = model.atoms()) {
    // Σ_{j,l} d_j d_l t^{|j-l|} = Σ d_j² + 2 Σ_j d_j u_j with u_j = t (u_{j-1} + d_{j-1}).
    double sum_sq = 0.0;
    for (double x : d) sum_sq += x * x;
    CompensatedSum total;
    for (const auto& atom : atoms->atoms) {
      const double t = atom.location;
      double u = 0.0;
      CompensatedSum cross;
      for (std::size_t j = 1; j < n; ++j) {
        u = t * (u + d[j - 1]);
        cross.add(d[j] * u);
      }
      total.add(atom.mass * (sum_sq + 2.0 * cross.value()));
    }
    return total.value();
  }
  if (!model.summable()) throw ConditionError("quadratic_form_variance: covariances are not summable");
  // |error| <= 2 Σ_{lag>L} |cov(lag)| Σ d² by Cauchy-Schwarz on the lag products.
  const long L = std::min<long>(tail_cutoff(model, 1, 0.5 * rel_tol) - 1, static_cast<long>(n) - 1);
  CompensatedSum total;
  for_each_cov(model, 0, L + 1, [&](long lag, double c) {
    const auto len = n - static_cast<std::size_t>(lag);
    const double products = ordered_dot(d.subspan(0, len), d.subspan(static_cast<std::size_t>(lag), len));
    total.add((lag == 0 ? 1.0 : 2.0) * c * products);
  });
  return total.value();
}

double fbm_cov(double s, double t, double beta, double sigma2) {
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)) {
    throw DomainError("fbm_cov: s and t must lie in [0, 1]");
  }
  if (!(beta > 0.0 && beta <= 2.0)) throw DomainError("fbm_cov: beta must lie in (0, 2]");
  return 0.5 * sigma2 * (std::pow(s, beta) + std::pow(t, beta) - std::pow(std::abs(t - s), beta));
}

double finite_n_variance_ratio(const CovarianceModel& model, long n) {
  if (n < 1) throw DomainError("finite_n_variance_ratio: n must be >= 1");
  CompensatedSum total;
  const double nn = static_cast<double>(n);
  for_each_cov(model, 0, n, [&](long k, double c) {
    const double weight = k == 0 ? 1.0 : 2.0 * (1.0 - static_cast<double>(k) / nn);
    total.add(weight * c);
  });
  return total.value();
}

// --- conditions -------------------------------------------------------------------

bool ConditionReport::all_passed() const noexcept {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

const ConditionResult* ConditionReport::find(const std::string& name) const noexcept {
  for (const auto& r : results) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

ConditionReport check_conditions(const CovarianceModel& model,
                                 const std::optional<SpectralAtoms>& atoms_in) {
  ConditionReport report;
  constexpr long kPartial = 1000;

  {
    ConditionResult abscov;
    abscov.name = "abscov";
    const double tail = model.abs_tail_bound(kPartial);
    if (std::isfinite(tail)) {
      CompensatedSum partial;
      for_each_cov(model, 0, kPartial, [&](long, double c) { partial.add(std::abs(c)); });
      abscov.passed = true;
      abscov.value = partial.value();
      abscov.margin = tail;
      abscov.note = "sum of |cov(k)| for k < 1000; margin is the certified tail bound";
    } else {
      abscov.value = kInf;
      abscov.margin = kInf;
      abscov.note = "spectral mass at |t| = 1: covariances are not absolutely summable";
    }
    report.results.push_back(abscov);
  }

  const SpectralAtoms* atoms = atoms_in ? &*atoms_in : model.atoms();
  {
    ConditionResult sr;
    sr.name = "SR";
    if (atoms) {
      double value = 0.0;
      double gap = 2.0;
      bool at_one = false;
      for (const auto& atom : atoms->atoms) {
        if (atom.mass <= 0.0) continue;
        if (atom.location >= 1.0) {
          at_one = true;
          continue;
        }
        value += atom.mass / (1.0 - atom.location);
        gap = std::min(gap, 1.0 - atom.location);
      }
      sr.passed = !at_one;
      sr.value = at_one ? kInf : value;
      sr.margin = at_one ? 0.0 : gap;
      sr.note = "sum of w/(1-t) over atoms; margin is the smallest distance 1 - t";
    } else {
      // ∫ 1/(1-t) dρ_g with t = 1-|x|: ∫ g²|x|^{-1} dπ = a/(2q+a-1)
      const auto& spec = *model.mh_spec();
      sr.passed = true;
      sr.value = spec.nu_exponent() / (mh_s(spec) - 1.0);
      sr.margin = mh_s(spec) - 1.0;
      sr.note = "closed form a/(2q+a-1); margin is the integrability exponent 2q+a-1";
    }
    report.results.push_back(sr);
  }

  if (atoms && model.kind() == CovarianceModel::Kind::GroupAtoms) {
    ConditionResult g1;
    g1.name = "G1";
    double value = 0.0;
    bool at_one = false;
    for (const auto& atom : atoms->atoms) {
      if (atom.mass <= 0.0) continue;
      if (std::abs(1.0 - atom.location) <= 0.0) {
        at_one = true;
        continue;
      }
      value += atom.mass / std::abs(1.0 - atom.location);
    }
    g1.passed = !at_one;
    g1.value = at_one ? kInf : value;
    g1.margin = g1.value;
    g1.note = "sum over characters of |fhat|^2/|1 - nu_hat|";
    report.results.push_back(g1);
  }

  {
    ConditionResult mgen;
    mgen.name = "Mgen";
    if (!model.summable()) {
      mgen.value = kInf;
      mgen.note = "Gamma_j diverges (covariances not absolutely summable)";
    } else {
      double first = 0.0;
      double previous = kInf;
      bool monotone = true;
      double last = 0.0;
      const std::vector<double> gamma = gamma_sequence(model, 1L << 14);
      CompensatedSum running;
      long next = 1;
      for (long p = 1; p <= (1L << 14); ++p) {
        running.add(gamma[static_cast<std::size_t>(p - 1)]);
        if (p != next) continue;
        next *= 2;
        const double c = running.value() / static_cast<double>(p);
        if (p == 1) first = c;
        if (c > previous * (1.0 + 1e-12)) monotone = false;
        previous = c;
        last = c;
      }
      mgen.value = last;
      mgen.margin = first > 0.0 ? last / first : 0.0;
      mgen.passed = monotone && (first == 0.0 || last < first);
      mgen.note = "Cesaro mean of Gamma_j at p = 2^14; margin is its ratio to p = 1";
    }
    report.results.push_back(mgen);
  }
  return report;
}

LimitTargets limit_targets(const ChainSpec& chain, const std::optional<CoefficientFamily>& family) {
  LimitTargets targets;
  const CovarianceModel model = CovarianceModel::from_chain(chain);
  if (const auto* mh = std::get_if<MHChainSpec>(&chain)) {
    targets.sigma2 = mh_sigma2(*mh);
    targets.eta_alternative = mh_eta_alternative(*mh);
  } else {
    targets.sigma2 = cov_sum_f0(model);
  }
  if (const auto atoms = model.atoms()) {
    targets.two_pi_h0 = group_2pi_h0(*atoms);
    targets.blocked_projection = blocked_projection_sum(*atoms);
  } else {
    targets.two_pi_h0 = 4.0 * targets.sigma2;
  }
  if (family) {
    targets.beta = family->beta();
    targets.hurst = family->beta() / 2.0;
    if (family->summable()) targets.abs_sum = abs_sum(*family);
  }
  return targets;
}

}  // namespace revlin
