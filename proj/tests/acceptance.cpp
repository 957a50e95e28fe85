// Acceptance run: one PASS/FAIL line per criterion, tolerances and runtime
// budgets pinned below. Usage: acceptance [--threads N] [criterion ...]
//
// Exit status is 0 when every criterion passes except those listed in
// kKnownUnattainable, which must still fail; see README.md.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "revlin/coefficients.hpp"
#include "revlin/innovations.hpp"
#include "revlin/json_io.hpp"
#include "revlin/mc.hpp"
#include "revlin/oracle.hpp"

using namespace revlin;

namespace {

// Criterion 7 asks for 27/8; the atom sum for that walk is 6.
const std::set<int> kKnownUnattainable{7};

unsigned g_threads = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

bool within_rel(double x, double target, double rel) { return std::abs(x - target) <= rel * std::abs(target); }

double stat(const ExperimentReport& rep, const char* name) { return rep.statistic(name)->value; }
double stat_se(const ExperimentReport& rep, const char* name) { return rep.statistic(name)->se.value_or(0.0); }

double target(const ExperimentReport& rep, const char* name) {
  for (const auto& [key, value] : rep.targets)
    if (key == name) return value;
  return std::nan("");
}

MHChainSpec mh11() { return MHChainSpec(1.0, 1.0); }

GroupWalkSpec z6_walk(bool with_f3) {
  std::vector<std::complex<double>> fhat(6);
  fhat[1] = fhat[5] = 0.5;
  if (with_f3) fhat[3] = 1.0;
  return GroupWalkSpec(6, {0.0, 0.5, 0.0, 0.0, 0.0, 0.5}, fhat);
}

ExperimentConfig experiment(ChainSpec chain, CoefficientFamily family, Mode mode, long n, long replicates,
                            std::uint64_t seed) {
  ExperimentConfig cfg(std::move(chain), std::move(family));
  cfg.mode = mode;
  cfg.n = n;
  cfg.replicates = replicates;
  cfg.seed = seed;
  cfg.threads = g_threads;
  return cfg;
}

// --- criteria ---------------------------------------------------------------------

Outcome oracle_exactness() {
  const double sigma2 = mh_sigma2(mh11());
  bool ok = std::abs(sigma2 - 2.0 / 3.0) <= 1e-15;

  // a ∫_0^1 x^{2q+a-1} (1-x)^k dx, the covariance as an integral over the rejection probability.
  boost::math::quadrature::tanh_sinh<double> integrator;
  double worst_quad = 0.0;
  const double params[][2] = {{1, 1}, {0.5, 0.75}, {2, 0.5}, {1, 2}, {3, 0.3}};
  for (const auto& p : params) {
    for (long k : {0L, 1L, 2L, 5L, 17L, 60L}) {
      const double a = p[0];
      const double q = p[1];
      const double quad = integrator.integrate(
          [&](double x) { return a * std::pow(x, 2 * q + a - 1) * std::pow(1 - x, static_cast<double>(k)); },
          0.0, 1.0);
      worst_quad = std::max(worst_quad, std::abs(mh_cov(MHChainSpec(a, q), k) - quad));
    }
  }
  ok = ok && worst_quad <= 1e-8;

  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> unit(1.0, 3.0);
  double worst_series = 0.0;
  for (int i = 0; i < 20; ++i) {
    const MHChainSpec spec(unit(gen), unit(gen));
    worst_series = std::max(worst_series, std::abs(cov_sum_f0(CovarianceModel::mh(spec)) - mh_sigma2(spec)));
  }
  ok = ok && worst_series <= 1e-10;
  return {ok, "sigma2=" + fmt(sigma2, 15) + " max|cov-quad|=" + fmt(worst_quad, 3) +
                  " (tol 1e-8) max|sigma2-series|=" + fmt(worst_series, 3) + " (tol 1e-10)"};
}

Outcome sign_discrepancy() {
  const ExperimentReport rep =
      run_experiment(experiment(mh11(), Delta{}, Mode::Clt, 5000, 2000, 20240601));
  const double vr = stat(rep, "variance_ratio");
  const double se = stat_se(rep, "variance_ratio");
  const double alt = mh_eta_alternative(mh11());
  const bool near = within_rel(vr, 2.0 / 3.0, 0.10);
  const bool apart = std::abs(vr - alt) > 5 * se;
  return {near && apart, "Var/n=" + fmt(vr) + " se=" + fmt(se, 3) + " target 2/3 +-10%; |Var/n-4/3|/se=" +
                             fmt(std::abs(vr - alt) / se, 4) + " (need > 5)"};
}

Outcome variance_probe() {
  const CovarianceModel model = CovarianceModel::mh(mh11());
  const long n = 5000;
  const double probe = finite_n_variance_ratio(model, n);
  double direct = mh_cov(mh11(), 0);
  for (long k = 1; k < n; ++k) direct += 2.0 * (1.0 - static_cast<double>(k) / n) * mh_cov(mh11(), k);
  const bool ok = within_rel(probe, 2.0 / 3.0, 0.02) && std::abs(probe - direct) <= 1e-12;
  return {ok, "probe=" + fmt(probe, 10) + " direct=" + fmt(direct, 10) + " target 2/3 +-2%"};
}

Outcome long_memory_clt() {
  ExperimentConfig cfg = experiment(mh11(), FracInt{0.25}, Mode::Clt, 1000, 2000, 20240602);
  cfg.eps = 1e-3;
  const ExperimentReport rep = run_experiment(cfg);
  const double vr = stat(rep, "variance_ratio");
  const double ks = stat(rep, "ks_distance");
  const bool ok = within_rel(vr, 2.0 / 3.0, 0.10) && ks < 0.05;
  return {ok, "variance ratio=" + fmt(vr) + " se=" + fmt(stat_se(rep, "variance_ratio"), 3) +
                  " target 2/3 +-10%; KS=" + fmt(ks, 4) + " (< 0.05); window=" +
                  fmt(stat(rep, "window_length"), 9)};
}

Outcome regular_variation() {
  const long n = 1L << 16;
  const CoefficientFamily frac(FracInt{0.25});
  const CoefficientFamily diff(PowerDiff{0.25});
  const double r_frac = bn2_value(frac, 2 * n) / bn2_value(frac, n);
  const double r_diff = bn2_value(diff, 2 * n, 1e-6) / bn2_value(diff, n, 1e-6);
  const bool ok = within_rel(r_frac, std::pow(2.0, 1.5), 0.02) && within_rel(r_diff, std::sqrt(2.0), 0.03);
  return {ok, "frac_int ratio=" + fmt(r_frac) + " (2^1.5 +-2%); power_diff ratio=" + fmt(r_diff) +
                  " (2^0.5 +-3%)"};
}

Outcome fbm_fdd() {
  ExperimentConfig cfg = experiment(mh11(), FracInt{0.25}, Mode::Fdd, 1024, 4000, 20240603);
  cfg.eps = 1e-3;
  cfg.t_grid = {0.25, 0.5, 1.0};
  const ExperimentReport rep = run_experiment(cfg);
  bool ok = rep.empirical.size() == 3;
  double worst = 0.0;
  for (std::size_t i = 0; ok && i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      // Oracle matrix recomputed here rather than read from the report.
      const double expected = fbm_cov(cfg.t_grid[i], cfg.t_grid[j], 1.5, 2.0 / 3.0);
      ok = ok && std::abs(rep.expected[i][j] - expected) <= 1e-12;
      const double rel = std::abs(rep.empirical[i][j] - expected) / expected;
      worst = std::max(worst, rel);
    }
  }
  const double corner = fbm_cov(0.25, 1.0, 1.5, 2.0 / 3.0);
  ok = ok && worst <= 0.15 && std::abs(corner - 0.15850) < 5e-5;
  return {ok, "max relative entry error=" + fmt(worst, 4) + " (<= 0.15); cov(0.25,1) empirical=" +
                  fmt(rep.empirical.empty() ? 0.0 : rep.empirical[0][2]) + " oracle=" + fmt(corner)};
}

Outcome blocked_process() {
  double estimate[2];
  double se[2];
  double two_pi_h0[2];
  double projection[2];
  for (int with_f3 = 0; with_f3 < 2; ++with_f3) {
    const ExperimentReport rep = run_experiment(
        experiment(z6_walk(with_f3 != 0), Delta{}, Mode::Blocks, 5000, 2000, 20240604 + with_f3));
    estimate[with_f3] = stat(rep, "variance_ratio");
    se[with_f3] = stat_se(rep, "variance_ratio");
    two_pi_h0[with_f3] = target(rep, "two_pi_h0");
    projection[with_f3] = target(rep, "blocked_projection_sum");
  }
  const double stated = 27.0 / 8.0;
  const bool unchanged = projection[0] == projection[1] && two_pi_h0[0] == two_pi_h0[1];
  const bool ok = unchanged && within_rel(estimate[0], stated, 0.10) && within_rel(estimate[1], stated, 0.10);
  std::string detail = "Var/b_n^2=" + fmt(estimate[0]) + " (se " + fmt(se[0], 3) + "), with f3: " +
                       fmt(estimate[1]) + " (se " + fmt(se[1], 3) + "); stated target 27/8 +-10%";
  detail += "; atom-sum target " + fmt(two_pi_h0[0]) + " -> relative errors " +
            fmt(std::abs(estimate[0] - two_pi_h0[0]) / two_pi_h0[0], 3) + ", " +
            fmt(std::abs(estimate[1] - two_pi_h0[1]) / two_pi_h0[1], 3);
  return {ok, detail};
}

Outcome short_memory() {
  ExperimentConfig cfg = experiment(mh11(), Geometric{0.5, 1.0}, Mode::ShortMem, 5000, 2000, 20240605);
  cfg.t_grid = {0.5, 1.0};
  const ExperimentReport rep = run_experiment(cfg);
  const double var = rep.empirical[1][1];
  const double cov = rep.empirical[0][1];
  const bool ok = within_rel(var, 8.0 / 3.0, 0.10) && within_rel(cov, 4.0 / 3.0, 0.15);
  return {ok, "Var(S_n/sqrt n)=" + fmt(var) + " (8/3 +-10%); cov(0.5,1)=" + fmt(cov) + " (4/3 +-15%)"};
}

Outcome spectral_identity() {
  const long n = 4096;
  // eps = 1e-2 keeps the quadratic form at ~8.6e5 weights; the ratio is taken
  // against the retained mass, so the window only enters through edge effects.
  const WeightProfile profile = weight_profile(CoefficientFamily(FracInt{0.25}), n, 1e-2);
  const double bn = profile.bn();
  std::vector<double> d(profile.weights);
  for (double& x : d) x /= bn;
  const CovarianceModel model = CovarianceModel::mh(mh11());
  const double ratio = quadratic_form_variance(d, model);
  const double f0 = cov_sum_f0(model);
  return {within_rel(ratio, f0, 0.02),
          "Var(sum d_j xi_j)=" + fmt(ratio, 8) + " vs 2pi f(0)=" + fmt(f0, 8) + " (+-2%), window=" +
              std::to_string(profile.size())};
}

Outcome condition_suite() {
  const CovarianceModel model = CovarianceModel::mh(mh11());
  double worst = 0.0;
  for (long j = 0; j <= 100; ++j) {
    const double closed = 1.0 / ((2.0 * j + 1) * (2.0 * j + 2));
    worst = std::max(worst, std::abs(gamma_j(model, j) - closed));
  }
  const double cesaro = cesaro_gamma(model, 10000);

  // Var(Σ d_j ξ_j) <= (cov(0) + 2 Σ_{k>=1} |cov(k)|) Σ d_j².
  auto abs_cov_sum = [](const CovarianceModel& m) {
    double s = std::abs(m.cov(0));
    for (long k = 1; k < 200000; ++k) s += 2.0 * std::abs(m.cov(k));
    return s;
  };
  const double bound_mh = abs_cov_sum(model);
  const CovarianceModel walk = CovarianceModel::from_chain(z6_walk(false));
  const double bound_walk = abs_cov_sum(walk);
  std::mt19937_64 gen(99);
  std::normal_distribution<double> normal;
  int violations = 0;
  double tightest = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> d(static_cast<std::size_t>(1 + trial * 7 % 300));
    double norm2 = 0.0;
    for (double& x : d) {
      x = normal(gen);
      norm2 += x * x;
    }
    const double ratio = quadratic_form_variance(d, model) / norm2;
    tightest = std::max(tightest, ratio / bound_mh);
    if (ratio > bound_mh * (1 + 1e-12)) ++violations;
    if (quadratic_form_variance(d, walk) > bound_walk * norm2 * (1 + 1e-12)) ++violations;
  }
  const bool ok = worst <= 1e-10 && cesaro < 1e-3 && violations == 0;
  return {ok, "max|Gamma_j - 1/((2j+1)(2j+2))|=" + fmt(worst, 3) + " (tol 1e-10); Cesaro(1e4)=" +
                  fmt(cesaro, 4) + " (< 1e-3); bound violations=" + std::to_string(violations) +
                  " of 200, largest ratio to bound " + fmt(tightest, 4)};
}

Outcome maximal_inequality() {
  const ExperimentReport rep = run_experiment(experiment(mh11(), Delta{}, Mode::Maximal, 1000, 2000, 20240606));
  const Check* lw = rep.check("lw_inequality");
  const double margin = stat(rep, "lw_margin");
  const double margin_se = stat_se(rep, "lw_margin");
  const bool ok = lw && lw->verdict == Verdict::Pass && margin >= 3 * margin_se;
  return {ok, "E max S_i^2=" + fmt(stat(rep, "mean_max_s2")) + " <= rhs " + fmt(stat(rep, "lw_rhs")) +
                  "; margin/se=" + fmt(margin / margin_se, 4) + " (>= 3)"};
}

Outcome determinism() {
  ExperimentConfig cfg = experiment(MHChainSpec(2.0, 0.75), FracInt{0.25}, Mode::Fdd, 256, 600, 20240607);
  cfg.eps = 1e-2;
  cfg.t_grid = {0.25, 0.5, 1.0};
  std::vector<std::string> sections;
  for (unsigned threads : {1u, 8u, 1u}) {
    cfg.threads = threads;
    const Json j = to_json(run_experiment(cfg));
    sections.push_back(dump(j.at("statistics")) + dump(j.at("covariance")) + dump(j.at("checks")));
  }
  const bool ok = sections[0] == sections[1] && sections[0] == sections[2];
  return {ok, std::string("statistics sections ") + (ok ? "byte-identical" : "differ") +
                  " across threads {1, 8, 1} (" + std::to_string(sections[0].size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  g_threads = std::max(1u, std::thread::hardware_concurrency());
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--threads" && i + 1 < argc) {
      g_threads = static_cast<unsigned>(std::max(1, std::atoi(argv[++i])));
    } else {
      const int id = std::atoi(arg.c_str());
      if (id < 1 || id > 12) {
        std::fprintf(stderr, "usage: acceptance [--threads N] [criterion 1-12 ...]\n");
        return 2;
      }
      selected.insert(id);
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "oracle exactness", 1, oracle_exactness},
      {2, "sign discrepancy", 60, sign_discrepancy},
      {3, "deterministic variance probe", 1, variance_probe},
      {4, "long-memory CLT", 300, long_memory_clt},
      {5, "regular variation", 30, regular_variation},
      {6, "fBm finite-dimensional distributions", 600, fbm_fdd},
      {7, "blocked process", 120, blocked_process},
      {8, "short memory", 180, short_memory},
      {9, "spectral variance identity", 30, spectral_identity},
      {10, "condition suite", 10, condition_suite},
      {11, "maximal inequality", 120, maximal_inequality},
      {12, "determinism", 60, determinism},
  };

  std::printf("acceptance: %u thread(s)\n", g_threads);
  int failed = 0;
  int unexpected = 0;
  int passed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = out.pass && in_time;
    const bool known = kKnownUnattainable.count(c.id) > 0;
    std::printf("criterion %2d %s  %s: %s [%.2f s, budget %g s%s]%s\n", c.id, pass ? "PASS" : "FAIL", c.name,
                out.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : ", over budget",
                known ? (pass ? " (expected to fail; investigate)" : " (known unattainable, see README)") : "");
    std::fflush(stdout);
    if (pass) {
      ++passed;
      if (known) ++unexpected;
    } else {
      ++failed;
      if (!known) ++unexpected;
    }
  }
  std::printf("acceptance: %d passed, %d failed, %d unexpected\n", passed, failed, unexpected);
  return unexpected == 0 ? 0 : 1;
}
