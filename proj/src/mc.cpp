#include "revlin/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "revlin/numeric.hpp"

namespace revlin {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

void require_conditions(const ConditionReport& report, std::initializer_list<const char*> names,
                        const char* mode) {
  for (const char* name : names) {
    const ConditionResult* r = report.find(name);
    if (r && !r->passed) {
      throw ConditionError(std::string(mode) + ": condition " + name + " failed (" + r->note + ")");
    }
  }
}

ExperimentReport start_report(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.mode = cfg.mode;
  rep.seed = cfg.seed;
  rep.n = cfg.n;
  rep.replicates = cfg.replicates;
  return rep;
}

void finish(ExperimentReport& rep, Clock::time_point start) {
  rep.verdict = overall_verdict(rep.checks);
  rep.runtime_seconds = seconds_since(start);
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t c) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

double ks_reference(long replicates) { return 1.36 / std::sqrt(static_cast<double>(replicates)); }

// Variance ratio, KS and mean checks on one normalized sample.
void scalar_checks(ExperimentReport& rep, const ExperimentConfig& cfg, std::span<const double> y,
                   double target, const std::string& target_name) {
  const SampleMoments m = sample_moments(y);
  rep.statistics.push_back({"mean", m.mean, m.se_mean});
  rep.statistics.push_back({"variance_ratio", m.variance, m.se_variance});
  const double scale = std::sqrt(target);
  std::vector<double> z(y.begin(), y.end());
  for (double& v : z) v /= scale;
  const double ks = target > 0.0 ? ks_distance(z, normal_cdf) : 1.0;
  const double reference = ks_reference(cfg.replicates);
  rep.statistics.push_back({"ks_distance", ks, std::nullopt});
  rep.statistics.push_back({"ks_reference", reference, std::nullopt});

  const auto& tol = cfg.tolerances;
  Check vr = relative_check("variance_ratio", m.variance, m.se_variance, target, tol.variance_ratio);
  vr.note = "Var(S_n)/b_n^2 against " + target_name;
  rep.checks.push_back(vr);
  Check k = upper_check("ks_distance", ks, reference, tol.ks);
  k.note = "standardized by sqrt(" + target_name + "); reference 1.36/sqrt(R)";
  rep.checks.push_back(k);
  const double mean_tol = tol.mean_se * std::sqrt(target / static_cast<double>(cfg.replicates));
  rep.checks.push_back(absolute_check("mean", m.mean, m.se_mean, 0.0, mean_tol));
}

struct Matrix {
  std::vector<std::vector<double>> value;
  std::vector<std::vector<double>> se;
};

Matrix covariance_matrix(const std::vector<std::vector<double>>& rows, std::size_t dim) {
  Matrix out;
  out.value.assign(dim, std::vector<double>(dim, 0.0));
  out.se.assign(dim, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < dim; ++c) cols.push_back(column(rows, c));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      const auto [c, se] = sample_covariance(cols[i], cols[j]);
      out.value[i][j] = out.value[j][i] = c;
      out.se[i][j] = out.se[j][i] = se;
    }
  }
  return out;
}

void matrix_checks(ExperimentReport& rep, const Matrix& emp, const std::vector<std::vector<double>>& expected,
                   std::span<const double> t_grid, double diag_tol, double offdiag_tol) {
  double max_abs = 0.0;
  double max_rel = 0.0;
  const std::size_t dim = t_grid.size();
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      const double target = expected[i][j];
      const double err = std::abs(emp.value[i][j] - target);
      max_abs = std::max(max_abs, err);
      if (target != 0.0) max_rel = std::max(max_rel, err / std::abs(target));
      const std::string name = "cov(" + fmt(t_grid[i]) + "," + fmt(t_grid[j]) + ")";
      rep.checks.push_back(
          relative_check(name, emp.value[i][j], emp.se[i][j], target, i == j ? diag_tol : offdiag_tol));
    }
  }
  rep.statistics.push_back({"max_abs_error", max_abs, std::nullopt});
  rep.statistics.push_back({"max_rel_error", max_rel, std::nullopt});
  rep.t_grid.assign(t_grid.begin(), t_grid.end());
  rep.empirical = emp.value;
  rep.expected = expected;
}

void keep(ExperimentReport& rep, const ExperimentConfig& cfg, std::vector<std::vector<double>>& rows) {
  if (cfg.keep_samples) rep.samples = std::move(rows);
}

void window_statistics(ExperimentReport& rep, const WeightProfile& profile) {
  rep.statistics.push_back({"bn2", profile.bn2, std::nullopt});
  rep.statistics.push_back({"window_length", static_cast<double>(profile.size()), std::nullopt});
  rep.statistics.push_back({"tail_fraction", profile.tail_fraction, std::nullopt});
}

const char* kMhNote =
    "sigma2 = a[2/(2q+a-1) - 1/(2q+a)] (covariance sum); the competing form "
    "a[1/(2q+a) + 2/(2q+a-1)] is reported as eta_alternative";

}  // namespace

const char* mode_name(Mode mode) noexcept {
  switch (mode) {
    case Mode::Clt: return "clt";
    case Mode::Fdd: return "fdd";
    case Mode::Blocks: return "blocks";
    case Mode::ShortMem: return "shortmem";
    default: return "maximal";
  }
}

Mode parse_mode(const std::string& name) {
  for (Mode m : {Mode::Clt, Mode::Fdd, Mode::Blocks, Mode::ShortMem, Mode::Maximal}) {
    if (name == mode_name(m)) return m;
  }
  throw ConfigError("unknown experiment mode '" + name + "'");
}

const char* verdict_name(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "inconclusive";
  }
}

void validate(const ExperimentConfig& cfg) {
  const long min_n = cfg.mode == Mode::Maximal ? 1 : 2;
  if (cfg.n < min_n) throw ConfigError("experiment.n must be >= " + std::to_string(min_n));
  if (cfg.replicates < 2) throw ConfigError("experiment.replicates must be >= 2");
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw ConfigError("experiment.eps must lie in (0, 1)");
  if (cfg.threads < 1) throw ConfigError("experiment.threads must be >= 1");
  const auto& t = cfg.tolerances;
  for (double v : {t.variance_ratio, t.covariance, t.ks, t.mean_se, t.separation_se, t.maximal_se,
                   t.key1_factor}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("tolerances must be positive and finite");
  }
  if (cfg.mode == Mode::Fdd || cfg.mode == Mode::ShortMem) {
    if (cfg.t_grid.empty()) throw ConfigError("experiment.t_grid must be nonempty");
    double previous = 0.0;
    for (double v : cfg.t_grid) {
      if (!(v > previous)) throw ConfigError("experiment.t_grid must be strictly increasing in (0, 1]");
      previous = v;
    }
    if (cfg.t_grid.back() > 1.0) throw ConfigError("experiment.t_grid must end at or below 1");
    if (std::floor(static_cast<double>(cfg.n) * cfg.t_grid.front()) < 1.0) {
      throw ConfigError("experiment.t_grid: [n t_1] must be >= 1");
    }
  }
  if (cfg.mode == Mode::ShortMem && !cfg.family.summable()) {
    throw ConfigError("shortmem mode needs a summable family (geometric or delta), got " +
                      cfg.family.name());
  }
  if (cfg.mode == Mode::Maximal && !cfg.family.get_if<Delta>()) {
    throw ConfigError("maximal mode concerns the innovation partial sums and needs the delta family");
  }
  for (long v : cfg.key1_n) {
    if (v < 1) throw ConfigError("experiment.key1_n entries must be >= 1");
  }
}

const Statistic* ExperimentReport::statistic(const std::string& name) const noexcept {
  for (const auto& s : statistics) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const Check* ExperimentReport::check(const std::string& name) const noexcept {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

// --- verdict rules ------------------------------------------------------------------

Check relative_check(std::string name, double estimate, double se, double target, double rel) {
  Check c{std::move(name), estimate, se, target, rel, "relative", Verdict::Inconclusive, ""};
  const double tol = rel * std::abs(target);
  if (!(tol > 3.0 * se)) return c;
  c.verdict = std::abs(estimate - target) <= tol ? Verdict::Pass : Verdict::Fail;
  return c;
}

Check absolute_check(std::string name, double estimate, double se, double target, double tol) {
  Check c{std::move(name), estimate, se, target, tol, "absolute", Verdict::Inconclusive, ""};
  if (!(tol > 3.0 * se)) return c;
  c.verdict = std::abs(estimate - target) <= tol ? Verdict::Pass : Verdict::Fail;
  return c;
}

Check upper_check(std::string name, double estimate, double reference, double bound) {
  Check c{std::move(name), estimate, reference, bound, bound, "upper", Verdict::Inconclusive, ""};
  if (!(bound > reference)) return c;
  c.verdict = estimate < bound ? Verdict::Pass : Verdict::Fail;
  return c;
}

Check separation_check(std::string name, double estimate, double se, double other, double k) {
  Check c{std::move(name), estimate, se, other, k * se, "separation", Verdict::Fail, ""};
  if (std::abs(estimate - other) > k * se) c.verdict = Verdict::Pass;
  return c;
}

Check inequality_check(std::string name, double lhs, double se_lhs, double rhs, double se_rhs,
                       double k) {
  Check c{std::move(name), lhs, se_lhs, rhs, k, "inequality", Verdict::Inconclusive, ""};
  if (lhs + k * se_lhs <= rhs - k * se_rhs) {
    c.verdict = Verdict::Pass;
  } else if (lhs - k * se_lhs > rhs + k * se_rhs) {
    c.verdict = Verdict::Fail;
  }
  return c;
}

Verdict overall_verdict(std::span<const Check> checks) noexcept {
  bool inconclusive = false;
  for (const auto& c : checks) {
    if (c.verdict == Verdict::Fail) return Verdict::Fail;
    if (c.verdict == Verdict::Inconclusive) inconclusive = true;
  }
  return inconclusive ? Verdict::Inconclusive : Verdict::Pass;
}

// --- statistics -----------------------------------------------------------------

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_distance: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    // ties: only the last copy of a value carries the full upper step
    const double f = cdf(x[i]);
    const double below = static_cast<double>(i) / n;
    std::size_t last = i;
    while (last + 1 < x.size() && x[last + 1] == x[i]) ++last;
    const double above = static_cast<double>(last + 1) / n;
    d = std::max({d, above - f, f - below});
    i = last;
  }
  return d;
}

SampleMoments sample_moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) throw DomainError("sample_moments: need at least 2 values");
  CompensatedSum sum;
  for (double v : x) sum.add(v);
  const double mean = sum.value() / n;
  CompensatedSum s2;
  CompensatedSum s4;
  for (double v : x) {
    const double d = (v - mean) * (v - mean);
    s2.add(d);
    s4.add(d * d);
  }
  SampleMoments m;
  m.mean = mean;
  m.variance = s2.value() / (n - 1.0);
  m.se_mean = std::sqrt(m.variance / n);
  const double m2 = s2.value() / n;
  const double m4 = s4.value() / n;
  m.se_variance = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return m;
}

std::pair<double, double> sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("sample_covariance: need two equal-length samples of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  CompensatedSum sx;
  CompensatedSum sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n;
  const double my = sy.value() / n;
  CompensatedSum sp;
  CompensatedSum sp2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = (x[i] - mx) * (y[i] - my);
    sp.add(p);
    sp2.add(p * p);
  }
  const double c = sp.value() / (n - 1.0);
  const double mean_p = sp.value() / n;
  const double se = std::sqrt(std::max(0.0, sp2.value() / n - mean_p * mean_p) / n);
  return {c, se};
}

bool degenerate_weights(const WeightProfile& profile) noexcept {
  return std::all_of(profile.weights.begin(), profile.weights.end(), [](double b) { return b == 0.0; });
}

std::vector<std::vector<double>> run_replicates(
    long count, std::uint64_t seed, std::uint64_t offset, unsigned threads,
    const std::function<std::vector<double>(RandomStream&, long)>& fn) {
  std::vector<std::vector<double>> results(static_cast<std::size_t>(std::max(0L, count)));
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const long r = next.fetch_add(1);
      if (r >= count) return;
      try {
        RandomStream rng(seed, offset + static_cast<std::uint64_t>(r));
        results[static_cast<std::size_t>(r)] = fn(rng, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max(1L, count))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

// --- experiments ----------------------------------------------------------------

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.mode) {
    case Mode::Clt: return run_clt(cfg);
    case Mode::Fdd: return run_fdd(cfg);
    case Mode::Blocks: return run_blocks(cfg);
    case Mode::ShortMem: return run_shortmem(cfg);
    default: return run_maximal(cfg);
  }
}

ExperimentReport run_clt(const ExperimentConfig& cfg_in) {
  const auto start = Clock::now();
  ExperimentConfig cfg = cfg_in;
  cfg.mode = Mode::Clt;
  validate(cfg);
  ExperimentReport rep = start_report(cfg);
  const CovarianceModel model = CovarianceModel::from_chain(cfg.chain);
  require_conditions(check_conditions(model), {"abscov", "Mgen"}, "clt");
  const LimitTargets targets = limit_targets(cfg.chain, cfg.family);
  rep.targets.emplace_back("sigma2", targets.sigma2);
  rep.targets.emplace_back("beta", cfg.family.beta());
  rep.targets.emplace_back("hurst", cfg.family.beta() / 2.0);

  const PathPlan plan(PathRequest{cfg.family, cfg.chain, cfg.n, {1.0}, cfg.eps, cfg.window});
  window_statistics(rep, plan.profile());
  auto rows = run_replicates(cfg.replicates, cfg.seed, 0, cfg.threads,
                             [&](RandomStream& rng, long) { return plan.sample(rng).values; });
  const std::vector<double> y = column(rows, 0);
  scalar_checks(rep, cfg, y, targets.sigma2, "sigma2");

  if (targets.eta_alternative) {
    rep.targets.emplace_back("eta_alternative", *targets.eta_alternative);
    const Statistic* vr = rep.statistic("variance_ratio");
    Check sep = separation_check("eta_alternative_separation", vr->value, *vr->se,
                                 *targets.eta_alternative, cfg.tolerances.separation_se);
    sep.note = "variance ratio must differ from the competing closed form";
    rep.checks.push_back(sep);
    rep.notes.emplace_back(kMhNote);
  }
  if (cfg.family.get_if<Delta>()) {
    rep.statistics.push_back({"exact_finite_n_ratio", finite_n_variance_ratio(model, cfg.n), std::nullopt});
  }
  rep.t_grid = {1.0};
  keep(rep, cfg, rows);
  finish(rep, start);
  return rep;
}

ExperimentReport run_fdd(const ExperimentConfig& cfg_in) {
  const auto start = Clock::now();
  ExperimentConfig cfg = cfg_in;
  cfg.mode = Mode::Fdd;
  validate(cfg);
  ExperimentReport rep = start_report(cfg);
  const CovarianceModel model = CovarianceModel::from_chain(cfg.chain);
  require_conditions(check_conditions(model), {"abscov", "Mgen"}, "fdd");
  const LimitTargets targets = limit_targets(cfg.chain, cfg.family);
  const double beta = cfg.family.beta();
  rep.targets.emplace_back("sigma2", targets.sigma2);
  rep.targets.emplace_back("beta", beta);
  rep.targets.emplace_back("hurst", beta / 2.0);

  const PathPlan plan(PathRequest{cfg.family, cfg.chain, cfg.n, cfg.t_grid, cfg.eps, cfg.window});
  window_statistics(rep, plan.profile());
  auto rows = run_replicates(cfg.replicates, cfg.seed, 0, cfg.threads,
                             [&](RandomStream& rng, long) { return plan.sample(rng).values; });
  const std::size_t dim = cfg.t_grid.size();
  std::vector<std::vector<double>> expected(dim, std::vector<double>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      expected[i][j] = fbm_cov(cfg.t_grid[i], cfg.t_grid[j], beta, targets.sigma2);
    }
  }
  matrix_checks(rep, covariance_matrix(rows, dim), expected, cfg.t_grid, cfg.tolerances.covariance,
                cfg.tolerances.covariance);
  keep(rep, cfg, rows);
  finish(rep, start);
  return rep;
}

ExperimentReport run_blocks(const ExperimentConfig& cfg_in) {
  const auto start = Clock::now();
  ExperimentConfig cfg = cfg_in;
  cfg.mode = Mode::Blocks;
  validate(cfg);
  ExperimentReport rep = start_report(cfg);
  const CovarianceModel model = CovarianceModel::from_chain(cfg.chain);
  require_conditions(check_conditions(model), {"SR"}, "blocks");
  const LimitTargets targets = limit_targets(cfg.chain, cfg.family);
  rep.targets.emplace_back("sigma2", targets.sigma2);
  rep.targets.emplace_back("two_pi_h0", targets.two_pi_h0);
  if (targets.blocked_projection) {
    rep.targets.emplace_back("blocked_projection_sum", *targets.blocked_projection);
    rep.notes.emplace_back(
        "blocked_projection_sum = sum of w(1+t)^3/(1-t) is reported for comparison; "
        "the variance target is two_pi_h0 = sum of 4w(1+t)/(1-t)");
  }

  const WeightProfile profile = weight_profile(cfg.family, cfg.n, cfg.eps, cfg.window);
  const WeightProfile blocked = blocked_weights(profile);
  window_statistics(rep, profile);
  if (degenerate_weights(blocked)) {
    rep.statistics.push_back({"zero_variance", 1.0, std::nullopt});
    Check c{"nondegenerate", 0.0, 0.0, 1.0, 0.0, "absolute", Verdict::Fail,
            "blocked weights are identically zero; S_n(X') = 0"};
    rep.checks.push_back(c);
    finish(rep, start);
    return rep;
  }
  const GridWeights grid = grid_weights(blocked);
  const double bn = profile.bn();
  auto rows = run_replicates(cfg.replicates, cfg.seed, 0, cfg.threads, [&](RandomStream& rng, long) {
    std::vector<double> sums(1);
    accumulate_columns(grid, cfg.chain, rng, sums);
    return std::vector<double>{sums[0] / bn};
  });
  const std::vector<double> y = column(rows, 0);
  scalar_checks(rep, cfg, y, targets.two_pi_h0, "two_pi_h0");
  rep.t_grid = {1.0};
  keep(rep, cfg, rows);
  finish(rep, start);
  return rep;
}

ExperimentReport run_shortmem(const ExperimentConfig& cfg_in) {
  const auto start = Clock::now();
  ExperimentConfig cfg = cfg_in;
  cfg.mode = Mode::ShortMem;
  validate(cfg);
  ExperimentReport rep = start_report(cfg);
  const CovarianceModel model = CovarianceModel::from_chain(cfg.chain);
  require_conditions(check_conditions(model), {"abscov"}, "shortmem");
  const LimitTargets targets = limit_targets(cfg.chain, cfg.family);
  const double a = abs_sum(cfg.family);
  const double scale = a * a * targets.sigma2;
  rep.targets.emplace_back("sigma2", targets.sigma2);
  rep.targets.emplace_back("abs_sum", a);
  rep.targets.emplace_back("a2_sigma2", scale);

  const std::vector<long> m = grid_indices(cfg.n, cfg.t_grid);
  const GridWeights grid = grid_weights(cfg.family, m, cfg.eps, cfg.window);
  rep.statistics.push_back({"window_length", static_cast<double>(grid.size()), std::nullopt});
  const double root_n = std::sqrt(static_cast<double>(cfg.n));
  auto rows = run_replicates(cfg.replicates, cfg.seed, 0, cfg.threads, [&](RandomStream& rng, long) {
    std::vector<double> sums(grid.count());
    accumulate_columns(grid, cfg.chain, rng, sums);
    for (double& s : sums) s /= root_n;
    return sums;
  });
  const std::size_t dim = cfg.t_grid.size();
  std::vector<std::vector<double>> expected(dim, std::vector<double>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      expected[i][j] = scale * std::min(cfg.t_grid[i], cfg.t_grid[j]);
    }
  }
  const Matrix emp = covariance_matrix(rows, dim);
  matrix_checks(rep, emp, expected, cfg.t_grid, cfg.tolerances.variance_ratio, cfg.tolerances.covariance);
  keep(rep, cfg, rows);
  finish(rep, start);
  return rep;
}

ExperimentReport run_maximal(const ExperimentConfig& cfg_in) {
  const auto start = Clock::now();
  ExperimentConfig cfg = cfg_in;
  cfg.mode = Mode::Maximal;
  validate(cfg);
  ExperimentReport rep = start_report(cfg);
  const long n = cfg.n;
  const double k = cfg.tolerances.maximal_se;

  // row: max S_i², max ξ_i², then S_1², ..., S_n²
  auto rows = run_replicates(cfg.replicates, cfg.seed, 0, cfg.threads, [&](RandomStream& rng, long) {
    const std::vector<double> xi = sample_path(cfg.chain, 1, n, rng);
    std::vector<double> row(static_cast<std::size_t>(n) + 2);
    double s = 0.0;
    double max_s2 = 0.0;
    double max_x2 = 0.0;
    for (long i = 0; i < n; ++i) {
      const double x = xi[static_cast<std::size_t>(i)];
      s += x;
      max_s2 = std::max(max_s2, s * s);
      max_x2 = std::max(max_x2, x * x);
      row[static_cast<std::size_t>(i) + 2] = s * s;
    }
    row[0] = max_s2;
    row[1] = max_x2;
    return row;
  });
  const SampleMoments lhs = sample_moments(column(rows, 0));
  const SampleMoments first = sample_moments(column(rows, 1));
  SampleMoments second;
  long argmax = 1;
  for (long i = 1; i <= n; ++i) {
    const SampleMoments si = sample_moments(column(rows, static_cast<std::size_t>(i) + 1));
    if (i == 1 || si.mean > second.mean) {
      second = si;
      argmax = i;
    }
  }
  const double rhs = 2.0 * first.mean + 22.0 * second.mean;
  const double se_rhs = 2.0 * first.se_mean + 22.0 * second.se_mean;
  rep.statistics.push_back({"mean_max_s2", lhs.mean, lhs.se_mean});
  rep.statistics.push_back({"mean_max_x2", first.mean, first.se_mean});
  rep.statistics.push_back({"max_mean_s2", second.mean, second.se_mean});
  rep.statistics.push_back({"max_mean_s2_index", static_cast<double>(argmax), std::nullopt});
  rep.statistics.push_back({"lw_rhs", rhs, se_rhs});
  rep.statistics.push_back({"lw_margin", rhs - lhs.mean, std::sqrt(lhs.se_mean * lhs.se_mean + se_rhs * se_rhs)});
  Check lw = inequality_check("lw_inequality", lhs.mean, lhs.se_mean, rhs, se_rhs, k);
  lw.note = "E max S_i^2 <= 2 E max X_i^2 + 22 max E S_i^2";
  rep.checks.push_back(lw);

  std::vector<long> key1 = cfg.key1_n;
  if (key1.empty()) key1 = {std::max(1L, n / 4), n, 4 * n};
  std::vector<SampleMoments> proxy;
  for (std::size_t set = 0; set < key1.size(); ++set) {
    const long m = key1[set];
    const double root_m = std::sqrt(static_cast<double>(m));
    const auto offset = static_cast<std::uint64_t>(set + 1) * static_cast<std::uint64_t>(cfg.replicates);
    auto sub = run_replicates(cfg.replicates, cfg.seed, offset, cfg.threads, [&](RandomStream& rng, long) {
      const std::vector<double> xi = sample_path(cfg.chain, 1, m, rng);
      double s = 0.0;
      double best = 0.0;
      for (double x : xi) {
        s += x;
        best = std::max(best, std::abs(s));
      }
      return std::vector<double>{best / root_m};
    });
    proxy.push_back(sample_moments(column(sub, 0)));
    rep.statistics.push_back({"key1_proxy_n" + std::to_string(m), proxy.back().mean, proxy.back().se_mean});
  }
  std::size_t worst = 0;
  for (std::size_t i = 1; i < proxy.size(); ++i) {
    if (proxy[i].mean > proxy[worst].mean) worst = i;
  }
  const double factor = cfg.tolerances.key1_factor;
  Check key = inequality_check("key1_proxy", proxy[worst].mean, proxy[worst].se_mean,
                               factor * proxy[0].mean, factor * proxy[0].se_mean, k);
  key.note = "max over n of E max|S_i|/sqrt(n) within key1_factor of its first value";
  rep.checks.push_back(key);
  finish(rep, start);
  return rep;
}

}  // namespace revlin
