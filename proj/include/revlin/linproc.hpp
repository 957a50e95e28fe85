#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "revlin/coefficients.hpp"
#include "revlin/innovations.hpp"
#include "revlin/numeric.hpp"
#include "revlin/rng.hpp"

namespace revlin {

/// S_n(X) = Σ_j b_{n,j} ξ_j with ξ aligned to [weights.j_min, weights.j_max].
/// Ascending-j accumulation; DomainError if the lengths differ.
double partial_sum(const WeightProfile& weights, std::span<const double> xi);

/// Coefficient on ξ_j of S_n(X′), X′_k = Σ_j a_{k+j}(ξ_j + ξ_{j+1}): b_{n,j} + b_{n,j-1}
/// on [j_min, j_max + 1]. bn2 of the result is its own retained mass; the
/// tail bound is 4x the original one.
WeightProfile blocked_weights(const WeightProfile& weights);

/// Several weight columns over nested windows. Column c holds b_{m_c, j} on
/// [j_min, ends[c]] (zeros below its own first index), with its window
/// certified separately at the requested eps.
struct GridWeights {
  long j_min = 0;
  std::vector<long> ends;
  std::vector<std::vector<double>> columns;  ///< columns[c][j - j_min]

  std::size_t count() const noexcept { return columns.size(); }
  long j_max() const noexcept;
  long size() const noexcept { return j_max() - j_min + 1; }
};

/// One certified profile per m in m_values, aligned to a common j_min.
/// `known`, when given, is used for m == known->n instead of recomputing it.
GridWeights grid_weights(const CoefficientFamily& family, std::span<const long> m_values,
                         double eps, const WindowOptions& options = {},
                         const WeightProfile* known = nullptr);

/// Single-column grid from one profile.
GridWeights grid_weights(const WeightProfile& profile);

/// Draws one stationary innovation path over the grid window and writes
/// Σ_j w[j, c] ξ_j for every column c into `sums`. Windows longer than
/// kCompensationThreshold are accumulated in blocks with compensation.
template <class Sampler>
  requires(!std::is_same_v<Sampler, ChainSpec>)
void accumulate_columns(const GridWeights& grid, Sampler& sampler, RandomStream& rng,
                        std::span<double> sums);

/// Same, for a ChainSpec.
void accumulate_columns(const GridWeights& grid, const ChainSpec& chain, RandomStream& rng,
                        std::span<double> sums);

struct PathRequest {
  CoefficientFamily family;
  ChainSpec chain;
  long n = 0;
  std::vector<double> t_grid;  ///< strictly increasing, in (0, 1]
  double eps = 1e-3;
  WindowOptions window{};
};

struct PathSample {
  std::vector<double> values;  ///< W_n(t) = S_{[nt]} / b_n per grid point
  double s_n = 0.0;            ///< S_n(X)
  double bn2 = 0.0;
  long j_min = 0;
  long j_max = -1;
};

/// Validates a request (grid shape, [n t_1] >= 1); DomainError otherwise.
void validate(const PathRequest& request);

/// Grid indices m_i = [n t_i].
std::vector<long> grid_indices(long n, std::span<const double> t_grid);

/// Weight plan for repeated sampling of one request. Each grid point gets its
/// own certified window; the last column is always m = n.
class PathPlan {
 public:
  explicit PathPlan(const PathRequest& request);

  const PathRequest& request() const noexcept { return request_; }
  const WeightProfile& profile() const noexcept { return profile_; }
  const GridWeights& grid() const noexcept { return grid_; }
  const std::vector<long>& m_values() const noexcept { return m_; }

  /// Cost is O(window x columns) per sample.
  PathSample sample(RandomStream& rng) const;

 private:
  PathRequest request_;
  WeightProfile profile_;
  std::vector<long> m_;
  GridWeights grid_;
};

PathSample path_values(const PathRequest& request, RandomStream& rng);

/// "replicate_id,t,W" rows.
std::string path_samples_csv(std::span<const double> t_grid,
                             std::span<const std::vector<double>> replicate_values);

// --- template implementation ---------------------------------------------------

template <class Sampler>
  requires(!std::is_same_v<Sampler, ChainSpec>)
void accumulate_columns(const GridWeights& grid, Sampler& sampler, RandomStream& rng,
                        std::span<double> sums) {
  const std::size_t cols = grid.count();
  for (std::size_t c = 0; c < cols; ++c) sums[c] = 0.0;
  if (cols == 0) return;
  const auto total = static_cast<std::size_t>(grid.size());
  const bool compensated = total > kCompensationThreshold;

  // Columns ordered by window end, longest first, so the columns still active
  // at any j are a prefix of that order.
  std::vector<std::size_t> order(cols);
  for (std::size_t c = 0; c < cols; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return grid.ends[x] > grid.ends[y]; });
  std::vector<const double*> w(cols);
  std::vector<std::size_t> stop(cols);
  for (std::size_t k = 0; k < cols; ++k) {
    w[k] = grid.columns[order[k]].data();
    stop[k] = static_cast<std::size_t>(grid.ends[order[k]] - grid.j_min + 1);
  }

  // ξ is drawn in blocks of kSummationBlock; each column is summed in
  // ascending j, and with compensation the block partials are combined.
  std::vector<CompensatedSum> acc(cols);
  std::vector<double> part(cols, 0.0);
  std::size_t active = cols;
  for (std::size_t begin = 0; begin < total; begin += kSummationBlock) {
    const std::size_t end = std::min(begin + kSummationBlock, total);
    std::size_t j = begin;
    if (j == 0) {
      const double x = sampler.start(rng);
      for (std::size_t k = 0; k < active; ++k) part[k] += w[k][0] * x;
      j = 1;
    }
    while (j < end) {
      while (active > 1 && stop[active - 1] <= j) --active;
      const std::size_t upto = std::min(end, stop[active - 1]);
      if (active == 1) {
        const double* w0 = w[0] + j;
        double sum = part[0];
        sampler.drive(rng, upto - j, [&](std::size_t i, double x) { sum += w0[i] * x; });
        part[0] = sum;
      } else if (active <= 4) {
        // Partial sums held in locals; same per-column order as the general case.
        auto fixed = [&]<std::size_t K>(std::integral_constant<std::size_t, K>) {
          const double* wk[K];
          double sum[K];
          for (std::size_t k = 0; k < K; ++k) {
            wk[k] = w[k] + j;
            sum[k] = part[k];
          }
          sampler.drive(rng, upto - j, [&](std::size_t i, double x) {
            for (std::size_t k = 0; k < K; ++k) sum[k] += wk[k][i] * x;
          });
          for (std::size_t k = 0; k < K; ++k) part[k] = sum[k];
        };
        if (active == 2) fixed(std::integral_constant<std::size_t, 2>{});
        else if (active == 3) fixed(std::integral_constant<std::size_t, 3>{});
        else fixed(std::integral_constant<std::size_t, 4>{});
      } else {
        const std::size_t offset = j;
        sampler.drive(rng, upto - j, [&](std::size_t i, double x) {
          for (std::size_t k = 0; k < active; ++k) part[k] += w[k][offset + i] * x;
        });
      }
      j = upto;
    }
    if (compensated) {
      for (std::size_t k = 0; k < cols; ++k) {
        acc[k].add(part[k]);
        part[k] = 0.0;
      }
    }
  }
  for (std::size_t k = 0; k < cols; ++k) sums[order[k]] = compensated ? acc[k].value() : part[k];
}

}  // namespace revlin
