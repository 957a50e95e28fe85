#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revlin/coefficients.hpp"
#include "revlin/innovations.hpp"
#include "revlin/linproc.hpp"
#include "revlin/oracle.hpp"

namespace revlin {

enum class Mode { Clt, Fdd, Blocks, ShortMem, Maximal };
enum class Verdict { Pass, Fail, Inconclusive };

const char* mode_name(Mode mode) noexcept;
/// "clt", "fdd", "blocks", "shortmem", "maximal"; ConfigError otherwise.
Mode parse_mode(const std::string& name);
const char* verdict_name(Verdict verdict) noexcept;

struct Tolerances {
  double variance_ratio = 0.10;  ///< relative
  double covariance = 0.15;      ///< relative, per matrix entry
  double ks = 0.05;              ///< absolute bound on the KS distance
  double mean_se = 4.0;          ///< mean tolerance is mean_se * sqrt(sigma2 / R)
  double separation_se = 5.0;    ///< MH: distance to the competing closed form
  double maximal_se = 3.0;       ///< slack on each side of an inequality check
  double key1_factor = 2.0;      ///< max proxy value <= key1_factor * first value
};

struct ExperimentConfig {
  ExperimentConfig(ChainSpec chain_in, CoefficientFamily family_in)
      : chain(std::move(chain_in)), family(std::move(family_in)) {}

  ChainSpec chain;
  CoefficientFamily family;
  Mode mode = Mode::Clt;
  long n = 1000;
  long replicates = 2000;
  std::vector<double> t_grid{1.0};
  double eps = 1e-3;
  std::uint64_t seed = 1;
  Tolerances tolerances{};
  WindowOptions window{};
  unsigned threads = 1;
  bool keep_samples = false;
  std::vector<long> key1_n;  ///< maximal mode; empty means {n/4, n, 4n}
};

/// ConfigError naming the first violated requirement.
void validate(const ExperimentConfig& cfg);

struct Statistic {
  std::string name;
  double value = 0.0;
  std::optional<double> se;
};

/// kind is "relative", "absolute", "upper" (estimate below target),
/// "separation" (estimate away from target) or "inequality" (estimate below
/// target with se-slack on both sides).
struct Check {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string kind;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

struct ExperimentReport {
  Mode mode = Mode::Clt;
  std::uint64_t seed = 0;
  long n = 0;
  long replicates = 0;
  std::vector<Statistic> statistics;
  std::vector<std::pair<std::string, double>> targets;
  std::vector<double> t_grid;                  ///< fdd / shortmem
  std::vector<std::vector<double>> empirical;  ///< covariance matrix estimate
  std::vector<std::vector<double>> expected;   ///< its oracle counterpart
  std::vector<Check> checks;
  std::vector<std::string> notes;
  Verdict verdict = Verdict::Inconclusive;
  double runtime_seconds = 0.0;
  /// Per-replicate normalized values on t_grid (kept when keep_samples).
  std::vector<std::vector<double>> samples;

  const Statistic* statistic(const std::string& name) const noexcept;
  const Check* check(const std::string& name) const noexcept;
};

// --- verdict rules ------------------------------------------------------------------

/// |estimate - target| <= rel * |target|; inconclusive when that tolerance is
/// not above 3 se.
Check relative_check(std::string name, double estimate, double se, double target, double rel);
/// |estimate - target| <= tol; inconclusive when tol <= 3 se.
Check absolute_check(std::string name, double estimate, double se, double target, double tol);
/// estimate < bound; inconclusive when bound <= reference (the noise scale).
Check upper_check(std::string name, double estimate, double reference, double bound);
/// |estimate - other| > k se.
Check separation_check(std::string name, double estimate, double se, double other, double k);
/// Pass when lhs + k se_lhs <= rhs - k se_rhs, fail when lhs - k se_lhs >
/// rhs + k se_rhs, inconclusive otherwise.
Check inequality_check(std::string name, double lhs, double se_lhs, double rhs, double se_rhs,
                       double k);

/// Fail if any check fails, else inconclusive if any is, else pass.
Verdict overall_verdict(std::span<const Check> checks) noexcept;

// --- statistics -------------------------------------------------------------------------

/// sup_x |F_N(x) - cdf(x)| for the empirical CDF F_N of samples.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  double se_mean = 0.0;
  double se_variance = 0.0;  ///< sqrt((m4 - v²)/R)
};
SampleMoments sample_moments(std::span<const double> x);

/// Unbiased covariance of (x, y) and its standard error.
std::pair<double, double> sample_covariance(std::span<const double> x, std::span<const double> y);

/// True when every weight is zero (S_n is identically 0).
bool degenerate_weights(const WeightProfile& profile) noexcept;

/// Runs fn(rng, r) for r in [0, count) with rng = RandomStream(seed, offset + r)
/// on `threads` workers; results are stored by r, so the output does not
/// depend on the number of workers or their scheduling.
std::vector<std::vector<double>> run_replicates(
    long count, std::uint64_t seed, std::uint64_t offset, unsigned threads,
    const std::function<std::vector<double>(RandomStream&, long)>& fn);

// --- experiments ------------------------------------------------------------------------

ExperimentReport run_experiment(const ExperimentConfig& cfg);
ExperimentReport run_clt(const ExperimentConfig& cfg);
ExperimentReport run_fdd(const ExperimentConfig& cfg);
ExperimentReport run_blocks(const ExperimentConfig& cfg);
ExperimentReport run_shortmem(const ExperimentConfig& cfg);
ExperimentReport run_maximal(const ExperimentConfig& cfg);

}  // namespace revlin
