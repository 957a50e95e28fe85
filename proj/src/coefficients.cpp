#include "revlin/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace revlin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* message) {
  if (!ok) throw DomainError(message);
}

}  // namespace

CoefficientFamily::CoefficientFamily(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const PowerLaw& f) {
                   require(f.alpha > 0.5 && f.alpha < 1.0, "power_law: alpha must lie in (1/2, 1)");
                 },
                 [](const FracInt& f) {
                   require(f.d > 0.0 && f.d < 0.5, "frac_int: d must lie in (0, 1/2)");
                 },
                 [](const PowerDiff& f) {
                   require(f.alpha > 0.0 && f.alpha < 0.5, "power_diff: alpha must lie in (0, 1/2)");
                 },
                 [](const LogPower& f) {
                   require(f.alpha > 0.5 && std::isfinite(f.alpha), "log_power: alpha must be > 1/2");
                 },
                 [](const Geometric& f) {
                   require(f.ratio > 0.0 && f.ratio < 1.0, "geometric: ratio must lie in (0, 1)");
                   require(f.scale > 0.0 && std::isfinite(f.scale), "geometric: scale must be > 0");
                 },
                 [](const Delta&) {},
             },
             v_);
}

std::string CoefficientFamily::name() const {
  return std::visit(overloaded{
                        [](const PowerLaw&) { return std::string("power_law"); },
                        [](const FracInt&) { return std::string("frac_int"); },
                        [](const PowerDiff&) { return std::string("power_diff"); },
                        [](const LogPower&) { return std::string("log_power"); },
                        [](const Geometric&) { return std::string("geometric"); },
                        [](const Delta&) { return std::string("delta"); },
                    },
                    v_);
}

long CoefficientFamily::first_index() const noexcept {
  return std::visit(overloaded{
                        [](const PowerLaw&) { return 1L; },
                        [](const FracInt&) { return 0L; },
                        [](const PowerDiff&) { return 0L; },
                        [](const LogPower&) { return 2L; },
                        [](const Geometric&) { return 0L; },
                        [](const Delta&) { return 1L; },
                    },
                    v_);
}

double CoefficientFamily::beta() const noexcept {
  return std::visit(overloaded{
                        [](const PowerLaw& f) { return 3.0 - 2.0 * f.alpha; },
                        [](const FracInt& f) { return 2.0 * f.d + 1.0; },
                        [](const PowerDiff& f) { return 1.0 - 2.0 * f.alpha; },
                        [](const LogPower&) { return 2.0; },
                        [](const Geometric&) { return 1.0; },
                        [](const Delta&) { return 1.0; },
                    },
                    v_);
}

bool CoefficientFamily::summable() const noexcept {
  return std::holds_alternative<Geometric>(v_) || std::holds_alternative<Delta>(v_);
}

bool operator==(const CoefficientFamily& x, const CoefficientFamily& y) {
  if (x.v_.index() != y.v_.index()) return false;
  return std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        const auto& b = std::get<T>(y.v_);
        if constexpr (std::is_same_v<T, Delta>) {
          return true;
        } else if constexpr (std::is_same_v<T, Geometric>) {
          return a.ratio == b.ratio && a.scale == b.scale;
        } else if constexpr (std::is_same_v<T, FracInt>) {
          return a.d == b.d;
        } else {
          return a.alpha == b.alpha;
        }
      },
      x.v_);
}

double coeff(const CoefficientFamily& family, long i) {
  if (i < family.first_index()) return 0.0;
  return std::visit(overloaded{
                        [i](const PowerLaw& f) { return std::pow(static_cast<double>(i), -f.alpha); },
                        [i](const FracInt& f) {
                          double a = 1.0;
                          for (long k = 0; k < i; ++k) {
                            a *= (static_cast<double>(k) + f.d) / static_cast<double>(k + 1);
                          }
                          return a;
                        },
                        [i](const PowerDiff& f) {
                          if (i == 0) return 1.0;
                          const double x = static_cast<double>(i);
                          // (i+1)^{-α} - i^{-α} without cancellation
                          return std::pow(x, -f.alpha) * std::expm1(-f.alpha * std::log1p(1.0 / x));
                        },
                        [i](const LogPower& f) {
                          const double x = static_cast<double>(i);
                          return 1.0 / (std::sqrt(x) * std::pow(std::log(x), f.alpha));
                        },
                        [i](const Geometric& f) {
                          return f.scale * std::pow(f.ratio, static_cast<double>(i));
                        },
                        [i](const Delta&) { return i == 1 ? 1.0 : 0.0; },
                    },
                    family.variant());
}

double abs_sum(const CoefficientFamily& family) {
  if (const auto* g = family.get_if<Geometric>()) return g->scale / (1.0 - g->ratio);
  if (family.get_if<Delta>() != nullptr) return 1.0;
  throw DomainError(family.name() + " is not accepted as an absolutely summable family");
}

// --- WeightStream -------------------------------------------------------------

WeightStream::WeightStream(const CoefficientFamily& family, long n)
    : family_(family),
      n_(n),
      first_j_(family.first_index() - n),
      j_(first_j_),
      lead_index_(family.first_index() - 1),
      lag_index_(family.first_index() - 1) {
  if (n < 1) throw DomainError("weights: n must be >= 1");
}

double WeightStream::term(long i) {
  // Only called with consecutive i per accumulator; FracInt keeps its own state.
  return coeff(family_, i);
}

double WeightStream::next() {
  const long j = j_++;
  const long n = n_;
  const auto& v = family_.variant();

  if (std::holds_alternative<Delta>(v)) {
    return (j >= 1 - n && j <= 0) ? 1.0 : 0.0;
  }
  if (const auto* g = std::get_if<Geometric>(&v)) {
    const double log_r = std::log(g->ratio);
    const double scale = g->scale / (1.0 - g->ratio);
    if (j + n < 0) return 0.0;
    if (j < 0) return -scale * std::expm1(static_cast<double>(j + n + 1) * log_r);
    return scale * std::exp(static_cast<double>(j + 1) * log_r) *
           -std::expm1(static_cast<double>(n) * log_r);
  }
  if (const auto* p = std::get_if<PowerDiff>(&v)) {
    if (j + n < 0) return 0.0;
    if (j < 0) return std::pow(static_cast<double>(j + n + 1), -p->alpha);
    const double x = static_cast<double>(j + 1);
    return std::pow(x, -p->alpha) *
           std::expm1(-p->alpha * std::log1p(static_cast<double>(n) / x));
  }

  const auto* frac = std::get_if<FracInt>(&v);
  auto next_term = [&](long i, double& frac_state) {
    if (frac != nullptr) {
      frac_state = (i == 0) ? 1.0
                            : frac_state * (static_cast<double>(i - 1) + frac->d) /
                                  static_cast<double>(i);
      return frac_state;
    }
    return term(i);
  };
  while (lead_index_ < j + n) {
    ++lead_index_;
    lead_.add(next_term(lead_index_, frac_lead_));
  }
  while (lag_index_ < j) {
    ++lag_index_;
    lag_.add(next_term(lag_index_, frac_lag_));
  }
  return difference(lead_, lag_);
}

// --- tail bounds and profiles -------------------------------------------------

double weight_tail_bound(const CoefficientFamily& family, long n, long j_max) {
  const double nn = static_cast<double>(n);
  const double J1 = static_cast<double>(j_max) + 1.0;
  return std::visit(
      overloaded{
          [&](const PowerLaw& f) {
            if (j_max < 0) return std::numeric_limits<double>::infinity();
            return nn * nn * std::pow(J1, 1.0 - 2.0 * f.alpha) / (2.0 * f.alpha - 1.0);
          },
          [&](const FracInt& f) {
            if (j_max < 0) return std::numeric_limits<double>::infinity();
            const double gd = std::tgamma(f.d);
            return nn * nn * std::pow(J1, 2.0 * f.d - 1.0) / ((1.0 - 2.0 * f.d) * gd * gd);
          },
          [&](const PowerDiff& f) {
            if (j_max < 0) return std::numeric_limits<double>::infinity();
            return f.alpha * f.alpha * nn * nn * std::pow(J1, -2.0 * f.alpha - 1.0) /
                   (2.0 * f.alpha + 1.0);
          },
          [&](const LogPower& f) {
            if (j_max < 1) return std::numeric_limits<double>::infinity();
            return nn * nn * std::pow(std::log(J1), 1.0 - 2.0 * f.alpha) / (2.0 * f.alpha - 1.0);
          },
          [&](const Geometric& f) {
            if (j_max < -1) return std::numeric_limits<double>::infinity();
            const double head = f.scale * -std::expm1(nn * std::log(f.ratio)) / (1.0 - f.ratio);
            return head * head * std::pow(f.ratio, 2.0 * (J1 + 1.0)) / (1.0 - f.ratio * f.ratio);
          },
          [&](const Delta&) { return j_max >= 0 ? 0.0 : std::numeric_limits<double>::infinity(); },
      },
      family.variant());
}

double WeightProfile::bn() const { return std::sqrt(bn2); }

double WeightProfile::at(long j) const noexcept {
  if (j < j_min || j > j_max) return 0.0;
  return weights[static_cast<std::size_t>(j - j_min)];
}

namespace {

// Smallest J in [lo, hi] with pred(J) true, for a predicate monotone in J
// (false...false true...true). Returns hi + 1 if none.
template <class Pred>
long first_true(long lo, long hi, Pred pred) {
  long result = hi + 1;
  while (lo <= hi) {
    const long mid = lo + (hi - lo) / 2;
    if (pred(mid)) {
      result = mid;
      hi = mid - 1;
    } else {
      lo = mid + 1;
    }
  }
  return result;
}

}  // namespace

WeightProfile weight_profile(const CoefficientFamily& family, long n, double eps,
                             const WindowOptions& options) {
  if (n < 1) throw DomainError("weight_profile: n must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("weight_profile: eps must lie in (0, 1)");

  WeightStream stream(family, n);
  const long j_min = stream.first_j();
  const long cap_j = j_min + options.max_window - 1;
  const long j_floor = std::max(j_min, family.get_if<LogPower>() != nullptr ? 1L : 0L);

  std::vector<double> weights;
  std::vector<double> cumulative;  // Σ_{j <= j_min + k} b²
  double running = 0.0;
  auto extend_to = [&](long j_last) {
    while (stream.next_j() <= j_last) {
      const double b = stream.next();
      weights.push_back(b);
      running += b * b;
      cumulative.push_back(running);
    }
  };

  // Provisional mass from a window of 64 n (or the cap), then the certified
  // right edge for that mass.
  const long j_probe = std::min(cap_j, std::max(j_floor, j_min + 64 * n));
  extend_to(j_probe);
  const double provisional = running;
  if (!(provisional > 0.0)) throw DomainError("weight_profile: b_n^2 vanishes");

  const auto certified_for = [&](double mass) {
    return [&family, n, eps, mass](long J) { return weight_tail_bound(family, n, J) <= eps * mass; };
  };
  long j_edge = j_probe;
  if (!certified_for(provisional)(j_probe)) {
    long hi = std::max<long>(j_probe, 1);
    while (hi < cap_j && !certified_for(provisional)(hi)) hi = std::min(cap_j, 2 * hi + 1);
    if (!certified_for(provisional)(hi)) {
      throw TruncationError("weight_profile: " + family.name() + " with n=" + std::to_string(n) +
                            " needs more than " + std::to_string(options.max_window) +
                            " window entries for eps=" + std::to_string(eps));
    }
    j_edge = first_true(j_probe, hi, certified_for(provisional));
    extend_to(j_edge);
  }

  // Tighten: smallest J whose own retained mass certifies it.
  const long j_max = first_true(j_floor, j_edge, [&](long J) {
    const double mass = cumulative[static_cast<std::size_t>(J - j_min)];
    return mass > 0.0 && weight_tail_bound(family, n, J) <= eps * mass;
  });

  WeightProfile profile;
  profile.n = n;
  profile.j_min = j_min;
  profile.j_max = j_max;
  weights.resize(static_cast<std::size_t>(j_max - j_min + 1));
  profile.weights = std::move(weights);
  profile.bn2 = std::accumulate(profile.weights.begin(), profile.weights.end(), 0.0,
                                [](double acc, double b) { return acc + b * b; });
  profile.tail_bound = weight_tail_bound(family, n, j_max);
  profile.tail_fraction = profile.tail_bound / profile.bn2;
  return profile;
}

std::string weight_profile_csv(const WeightProfile& profile) {
  std::string out = "j,b\n";
  char line[64];
  for (long j = profile.j_min; j <= profile.j_max; ++j) {
    std::snprintf(line, sizeof line, "%ld,%.15g\n", j, profile.at(j));
    out += line;
  }
  return out;
}

std::optional<double> bn2_exact(const CoefficientFamily& family, long n) {
  if (n < 1) throw DomainError("bn2_exact: n must be >= 1");
  const double nn = static_cast<double>(n);
  if (family.get_if<Delta>() != nullptr) return nn;
  CompensatedSum total;
  if (const auto* f = family.get_if<FracInt>()) {
    // ARFIMA(0,d,0) filter autocovariance with unit innovation variance.
    double r = std::exp(std::lgamma(1.0 - 2.0 * f->d) - 2.0 * std::lgamma(1.0 - f->d));
    total.add(nn * r);
    for (long h = 1; h < n; ++h) {
      r *= (static_cast<double>(h - 1) + f->d) / (static_cast<double>(h) - f->d);
      total.add(2.0 * static_cast<double>(n - h) * r);
    }
    return total.value();
  }
  if (const auto* g = family.get_if<Geometric>()) {
    double r = g->scale * g->scale / (1.0 - g->ratio * g->ratio);
    total.add(nn * r);
    for (long h = 1; h < n; ++h) {
      r *= g->ratio;
      total.add(2.0 * static_cast<double>(n - h) * r);
    }
    return total.value();
  }
  return std::nullopt;
}

double bn2_value(const CoefficientFamily& family, long n, double eps,
                 const WindowOptions& options) {
  if (auto exact = bn2_exact(family, n)) return *exact;
  const WeightProfile profile = weight_profile(family, n, eps, options);
  return profile.bn2 + 0.5 * profile.tail_bound;
}

RegVarDiagnostic regvar_diagnostic(const CoefficientFamily& family, long n,
                                   std::span<const double> t_grid, double eps,
                                   const WindowOptions& options) {
  if (n < 1) throw DomainError("regvar_diagnostic: n must be >= 1");
  RegVarDiagnostic diag;
  diag.n = n;
  diag.beta = family.beta();
  const double bn2 = bn2_value(family, n, eps, options);
  for (double t : t_grid) {
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("regvar_diagnostic: t must lie in (0, 1]");
    const auto m = static_cast<long>(std::floor(static_cast<double>(n) * t));
    if (m < 1) throw DomainError("regvar_diagnostic: [n t] must be >= 1");
    diag.rows.push_back({t, bn2_value(family, m, eps, options) / bn2, std::pow(t, diag.beta)});
  }

  // Dyadic grid n/16, ..., n (points below 1 dropped).
  std::vector<double> xs;
  std::vector<double> ys;
  for (int k = 4; k >= 0; --k) {
    const long m = n >> k;
    if (m < 1) continue;
    diag.fit_n.push_back(m);
    xs.push_back(std::log(static_cast<double>(m)));
    ys.push_back(std::log(m == n ? bn2 : bn2_value(family, m, eps, options)));
  }
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    diag.fitted_slope = sxy / sxx;
  }
  return diag;
}

}  // namespace revlin
