#include "revlin/linproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace revlin {

double partial_sum(const WeightProfile& weights, std::span<const double> xi) {
  if (static_cast<long>(xi.size()) != weights.size()) {
    throw DomainError("partial_sum: innovation window of length " + std::to_string(xi.size()) +
                      " does not match the weight window of length " +
                      std::to_string(weights.size()));
  }
  return ordered_dot(weights.weights, xi);
}

WeightProfile blocked_weights(const WeightProfile& weights) {
  WeightProfile out;
  out.n = weights.n;
  out.j_min = weights.j_min;
  out.j_max = weights.j_max + 1;
  out.weights.resize(weights.weights.size() + 1);
  double previous = 0.0;
  for (std::size_t k = 0; k < weights.weights.size(); ++k) {
    out.weights[k] = weights.weights[k] + previous;
    previous = weights.weights[k];
  }
  out.weights.back() = previous;
  for (double b : out.weights) out.bn2 += b * b;
  out.tail_bound = 4.0 * weights.tail_bound;
  out.tail_fraction = out.bn2 > 0.0 ? out.tail_bound / out.bn2 : 0.0;
  return out;
}

long GridWeights::j_max() const noexcept {
  long end = j_min - 1;
  for (long e : ends) end = std::max(end, e);
  return end;
}

GridWeights grid_weights(const CoefficientFamily& family, std::span<const long> m_values,
                         double eps, const WindowOptions& options,
                         const WeightProfile* known) {
  GridWeights grid;
  if (m_values.empty()) return grid;
  long m_max = 0;
  for (long m : m_values) m_max = std::max(m_max, m);
  grid.j_min = family.first_index() - m_max;
  std::vector<std::pair<long, std::size_t>> built;  // m -> column index
  for (long m : m_values) {
    const auto same = std::find_if(built.begin(), built.end(), [m](const auto& e) { return e.first == m; });
    if (same != built.end()) {
      grid.ends.push_back(grid.ends[same->second]);
      grid.columns.push_back(grid.columns[same->second]);
      continue;
    }
    const WeightProfile profile =
        known && known->n == m ? *known : weight_profile(family, m, eps, options);
    std::vector<double> column(static_cast<std::size_t>(profile.j_max - grid.j_min + 1), 0.0);
    std::copy(profile.weights.begin(), profile.weights.end(),
              column.begin() + (profile.j_min - grid.j_min));
    built.emplace_back(m, grid.columns.size());
    grid.ends.push_back(profile.j_max);
    grid.columns.push_back(std::move(column));
  }
  return grid;
}

GridWeights grid_weights(const WeightProfile& profile) {
  GridWeights grid;
  grid.j_min = profile.j_min;
  grid.ends.push_back(profile.j_max);
  grid.columns.push_back(profile.weights);
  return grid;
}

void accumulate_columns(const GridWeights& grid, const ChainSpec& chain, RandomStream& rng,
                        std::span<double> sums) {
  with_sampler(chain, [&](auto& sampler) { accumulate_columns(grid, sampler, rng, sums); });
}

void validate(const PathRequest& request) {
  if (request.n < 1) throw DomainError("path request: n must be >= 1");
  if (request.t_grid.empty()) throw DomainError("path request: t_grid must be nonempty");
  double previous = 0.0;
  for (double t : request.t_grid) {
    if (!(t > previous)) throw DomainError("path request: t_grid must be strictly increasing in (0, 1]");
    previous = t;
  }
  if (request.t_grid.back() > 1.0) throw DomainError("path request: t_grid must end at or below 1");
  if (std::floor(static_cast<double>(request.n) * request.t_grid.front()) < 1.0) {
    throw DomainError("path request: [n t_1] must be >= 1");
  }
}

std::vector<long> grid_indices(long n, std::span<const double> t_grid) {
  std::vector<long> m;
  m.reserve(t_grid.size());
  for (double t : t_grid) m.push_back(static_cast<long>(std::floor(static_cast<double>(n) * t)));
  return m;
}

PathPlan::PathPlan(const PathRequest& request)
    : request_(request),
      profile_((validate(request), weight_profile(request.family, request.n, request.eps, request.window))),
      m_(grid_indices(request.n, request.t_grid)) {
  std::vector<long> columns = m_;
  if (columns.back() != request.n) columns.push_back(request.n);
  grid_ = grid_weights(request.family, columns, request.eps, request.window, &profile_);
}

PathSample PathPlan::sample(RandomStream& rng) const {
  std::vector<double> sums(grid_.count());
  accumulate_columns(grid_, request_.chain, rng, sums);
  PathSample out;
  out.bn2 = profile_.bn2;
  out.j_min = grid_.j_min;
  out.j_max = grid_.j_max();
  out.s_n = sums.back();
  const double bn = profile_.bn();
  out.values.reserve(m_.size());
  for (std::size_t i = 0; i < m_.size(); ++i) out.values.push_back(sums[i] / bn);
  return out;
}

PathSample path_values(const PathRequest& request, RandomStream& rng) {
  return PathPlan(request).sample(rng);
}

std::string path_samples_csv(std::span<const double> t_grid,
                             std::span<const std::vector<double>> replicate_values) {
  std::string out = "replicate_id,t,W\n";
  char line[96];
  for (std::size_t r = 0; r < replicate_values.size(); ++r) {
    for (std::size_t i = 0; i < t_grid.size() && i < replicate_values[r].size(); ++i) {
      std::snprintf(line, sizeof line, "%zu,%.15g,%.15g\n", r, t_grid[i], replicate_values[r][i]);
      out += line;
    }
  }
  return out;
}

}  // namespace revlin
