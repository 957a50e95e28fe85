#pragma once

#include <complex>
#include <vector>

#include "revlin/innovations.hpp"

namespace revlin::test {

inline MHChainSpec mh11() { return MHChainSpec(1.0, 1.0); }

// Z_6, ν uniform on {1, 5}, f̂(1) = f̂(5) = 1/2, optionally f̂(3) = 1.
inline GroupWalkSpec z6_walk(bool with_f3 = false) {
  std::vector<double> pmf{0.0, 0.5, 0.0, 0.0, 0.0, 0.5};
  std::vector<std::complex<double>> fhat(6);
  fhat[1] = fhat[5] = 0.5;
  if (with_f3) fhat[3] = 1.0;
  return GroupWalkSpec(6, pmf, fhat);
}

// Transition matrix of a walk on Z_m: P[x][y] = ν(y - x).
inline std::vector<std::vector<double>> transition_matrix(const GroupWalkSpec& spec) {
  const int m = spec.modulus();
  std::vector<std::vector<double>> p(m, std::vector<double>(m, 0.0));
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) p[x][y] = spec.step_pmf()[static_cast<std::size_t>((y - x + m) % m)];
  return p;
}

// cov(f(γ_0), f(γ_k)) under the uniform stationary law, by k matrix-vector products.
inline double group_cov_direct(const GroupWalkSpec& spec, long k) {
  const auto p = transition_matrix(spec);
  const int m = spec.modulus();
  std::vector<double> v = spec.f_table();
  for (long s = 0; s < k; ++s) {
    std::vector<double> next(m, 0.0);
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y) next[x] += p[x][y] * v[y];
    v = next;
  }
  double mean = 0.0;
  double c = 0.0;
  for (int x = 0; x < m; ++x) {
    mean += spec.f_table()[x] / m;
    c += spec.f_table()[x] * v[x] / m;
  }
  return c - mean * mean;
}

}  // namespace revlin::test
