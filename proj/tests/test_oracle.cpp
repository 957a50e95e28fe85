#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "revlin/oracle.hpp"
#include "support.hpp"

using namespace revlin;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// cov(k) = θ^{-1} ∫ g²(x)(1-|x|)^k |x|^{-1} ν(dx) = a ∫_0^1 x^{2q+a-1}(1-x)^k dx.
double mh_cov_quadrature(double a, double q, long k) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(
      [&](double x) { return a * std::pow(x, 2 * q + a - 1) * std::pow(1 - x, static_cast<double>(k)); },
      0.0, 1.0);
}

// ∫ (1+t)/(1-t) ρ_g(dt) with t = 1 - x: a ∫_0^1 x^{2q+a-2}(2-x) dx.
double mh_sigma2_quadrature(double a, double q) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([&](double x) { return a * std::pow(x, 2 * q + a - 2) * (2 - x); },
                              0.0, 1.0);
}

SpectralAtoms atoms(std::vector<SpectralAtom> list) { return SpectralAtoms{std::move(list)}; }

}  // namespace

TEST_CASE("mh_cov closed form", "[oracle]") {
  const MHChainSpec spec = test::mh11();
  CHECK_THAT(mh_cov(spec, 0), WithinAbs(1.0 / 3.0, 1e-15));
  CHECK_THAT(mh_cov(spec, 1), WithinAbs(1.0 / 12.0, 1e-15));
  CHECK(mh_cov(spec, 100) < mh_cov(spec, 10));
  CHECK(mh_cov(spec, 10) < mh_cov(spec, 1));
}

TEST_CASE("mh_cov matches quadrature", "[oracle]") {
  const double params[][2] = {{1, 1}, {0.5, 0.75}, {2, 0.5}, {1, 2}, {3, 0.3}};
  for (const auto& p : params) {
    const MHChainSpec spec(p[0], p[1]);
    for (long k : {0L, 1L, 2L, 5L, 17L, 60L}) {
      INFO("a=" << p[0] << " q=" << p[1] << " k=" << k);
      CHECK_THAT(mh_cov(spec, k), WithinAbs(mh_cov_quadrature(p[0], p[1], k), 1e-8));
    }
  }
}

TEST_CASE("mh_sigma2", "[oracle]") {
  CHECK_THAT(mh_sigma2(test::mh11()), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(mh_sigma2(MHChainSpec(1, 2)), WithinAbs(0.3, 1e-15));
  CHECK_THAT(mh_eta_alternative(test::mh11()), WithinAbs(4.0 / 3.0, 1e-15));
  for (const auto& p : {std::pair{1.0, 1.0}, {2.0, 0.5}, {0.7, 0.9}}) {
    CHECK_THAT(mh_sigma2(MHChainSpec(p.first, p.second)),
               WithinAbs(mh_sigma2_quadrature(p.first, p.second), 1e-8));
  }
}

TEST_CASE("mh_sigma2 agrees with the covariance series", "[oracle]") {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> unit(1.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const MHChainSpec spec(unit(gen), unit(gen));
    INFO("a=" << spec.nu_exponent() << " q=" << spec.g_exponent());
    CHECK_THAT(cov_sum_f0(CovarianceModel::mh(spec)), WithinAbs(mh_sigma2(spec), 1e-10));
  }
}

TEST_CASE("hermite_cov", "[oracle]") {
  CHECK_THAT(hermite_cov(GaussianChainSpec(0.5, {1.0}), 3), WithinAbs(0.125, 1e-15));
  CHECK_THAT(hermite_cov(GaussianChainSpec(0.5, {0.0, 1.0}), 1), WithinAbs(0.5, 1e-15));
  CHECK_THAT(hermite_cov(GaussianChainSpec(0.5, {1.0, 1.0}), 0), WithinAbs(3.0, 1e-15));
}

TEST_CASE("cov(0) equals the stationary second moment of g", "[oracle]") {
  SECTION("Gaussian chain") {
    const GaussianChainSpec spec(0.6, {0.7, -0.4, 0.25});
    boost::math::quadrature::sinh_sinh<double> integrator;
    const double moment = integrator.integrate([&](double x) {
      if (std::abs(x) > 40) return 0.0;
      const double g = spec.g(x);
      return g * g * std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI);
    });
    CHECK_THAT(hermite_cov(spec, 0), WithinAbs(moment, 1e-8));
  }
  SECTION("group walk") {
    const GroupWalkSpec spec = test::z6_walk(true);
    const CovarianceModel model = CovarianceModel::from_chain(spec);
    for (long k = 0; k <= 12; ++k) CHECK_THAT(model.cov(k), WithinAbs(test::group_cov_direct(spec, k), 1e-13));
  }
}

TEST_CASE("cov_sum_f0", "[oracle]") {
  CHECK_THAT(cov_sum_f0(CovarianceModel::mh(test::mh11())), WithinAbs(2.0 / 3.0, 1e-10));
  CHECK_THAT(cov_sum_f0(CovarianceModel::hermite(GaussianChainSpec(0.5, {1.0}))), WithinAbs(3.0, 1e-12));
  CHECK_THAT(cov_sum_f0(CovarianceModel::group_atoms(atoms({{0.5, 0.5}}))), WithinAbs(1.5, 1e-15));
}

TEST_CASE("group_2pi_h0 is the long-run variance of the blocked sequence", "[oracle]") {
  const SpectralAtoms a = atoms({{0.5, 0.5}});
  CHECK_THAT(group_2pi_h0(a), WithinAbs(6.0, 1e-14));
  CHECK(group_2pi_h0(atoms({{-1.0, 1.0}})) == 0.0);
  CHECK_THAT(group_2pi_h0(atoms({{-1.0, 1.0}, {0.5, 0.5}})), WithinAbs(6.0, 1e-14));

  // Σ_k cov(ζ_0, ζ_k) with cov_ζ(k) = 2c(k) + c(k-1) + c(k+1), summed directly.
  const CovarianceModel model = CovarianceModel::group_atoms(a);
  double direct = 0.0;
  for (long k = -200; k <= 200; ++k) direct += 2 * model.cov(k) + model.cov(k - 1) + model.cov(k + 1);
  CHECK_THAT(group_2pi_h0(a), WithinAbs(direct, 1e-12));
}

TEST_CASE("blocked_projection_sum", "[oracle]") {
  const SpectralAtoms a = atoms({{0.5, 0.5}});
  CHECK_THAT(blocked_projection_sum(a), WithinAbs(27.0 / 8.0, 1e-14));
  CHECK(blocked_projection_sum(atoms({{-1.0, 1.0}})) == 0.0);
  double direct = 0.0;
  for (long k = -200; k <= 200; ++k) direct += 0.5 * std::pow(0.5, std::abs(k)) * 1.5 * 1.5;
  CHECK_THAT(blocked_projection_sum(a), WithinAbs(direct, 1e-12));
}

TEST_CASE("gamma_j", "[oracle]") {
  const CovarianceModel model = CovarianceModel::mh(test::mh11());
  CHECK_THAT(gamma_j(model, 0), WithinAbs(0.5, 1e-14));
  CHECK_THAT(gamma_j(model, 2), WithinAbs(1.0 / 30.0, 1e-14));
  CHECK_THAT(gamma_j_series(model, 2), WithinAbs(1.0 / 30.0, 1e-10));
  double previous = gamma_j(model, 0);
  for (long j = 0; j <= 100; ++j) {
    const double g = gamma_j(model, j);
    CHECK_THAT(g, WithinAbs(1.0 / ((2.0 * j + 1) * (2.0 * j + 2)), 1e-10));
    CHECK(g <= previous);
    previous = g;
  }
  CHECK(cesaro_gamma(model, 10000) < 1e-3);
  double last = cesaro_gamma(model, 1);
  for (long p = 2; p <= 4096; p *= 2) {
    const double c = cesaro_gamma(model, p);
    CHECK(c < last);
    last = c;
  }
}

TEST_CASE("gamma_j closed form agrees with the series for other models", "[oracle]") {
  const CovarianceModel mh = CovarianceModel::mh(MHChainSpec(2.0, 0.75));
  const CovarianceModel hermite = CovarianceModel::hermite(GaussianChainSpec(0.7, {1.0, 0.5}));
  for (long j : {0L, 1L, 3L, 10L}) {
    CHECK_THAT(gamma_j(mh, j), WithinRel(gamma_j_series(mh, j), 1e-8));
    CHECK_THAT(gamma_j(hermite, j), WithinRel(gamma_j_series(hermite, j), 1e-10));
  }
}

TEST_CASE("gamma_sequence recursion agrees with direct series", "[oracle]") {
  const CovarianceModel mixed = CovarianceModel::group_atoms(atoms({{-0.9, 0.3}, {0.2, 0.5}, {0.7, 0.2}}));
  const std::vector<double> gamma = gamma_sequence(mixed, 40);
  for (long j = 1; j <= 40; ++j) {
    INFO("j=" << j);
    CHECK_THAT(gamma[static_cast<std::size_t>(j - 1)], WithinAbs(gamma_j_series(mixed, j), 1e-13));
  }
  const CovarianceModel positive = CovarianceModel::group_atoms(atoms({{0.2, 0.5}, {0.7, 0.2}}));
  for (long j : {0L, 3L, 12L}) CHECK_THAT(gamma_j(positive, j), WithinAbs(gamma_j_series(positive, j), 1e-13));
}

TEST_CASE("check_conditions", "[oracle]") {
  const ConditionReport mh = check_conditions(CovarianceModel::mh(test::mh11()));
  REQUIRE(mh.find("abscov"));
  CHECK(mh.find("abscov")->passed);
  CHECK_THAT(mh.find("abscov")->value + mh.find("abscov")->margin, WithinAbs(0.5, 1e-5));
  CHECK(mh.find("Mgen")->passed);
  CHECK(mh.all_passed());

  const ConditionReport periodic = check_conditions(CovarianceModel::group_atoms(atoms({{-1.0, 1.0}})));
  REQUIRE(periodic.find("SR"));
  CHECK(periodic.find("SR")->passed);
  CHECK_THAT(periodic.find("SR")->value, WithinAbs(0.5, 1e-15));

  const ConditionReport near = check_conditions(CovarianceModel::group_atoms(atoms({{0.999999, 1.0}})));
  CHECK(near.find("SR")->passed);
  CHECK_THAT(near.find("SR")->value, WithinRel(1e6, 1e-6));

  const ConditionReport walk = check_conditions(CovarianceModel::from_chain(test::z6_walk()));
  REQUIRE(walk.find("G1"));
  CHECK(walk.find("G1")->passed);
  // Σ |f̂(j)|² / |1 - ν̂(j)| = 2 · 0.25 / 0.5.
  CHECK_THAT(walk.find("G1")->value, WithinAbs(1.0, 1e-12));
}

TEST_CASE("quadratic_form_variance", "[oracle]") {
  const CovarianceModel mh = CovarianceModel::mh(test::mh11());
  const std::vector<double> one{1.0};
  CHECK_THAT(quadratic_form_variance(one, mh), WithinAbs(1.0 / 3.0, 1e-15));
  const std::vector<double> two{1.0, 1.0};
  CHECK_THAT(quadratic_form_variance(two, mh), WithinAbs(5.0 / 6.0, 1e-15));

  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal;
  const CovarianceModel walk = CovarianceModel::from_chain(test::z6_walk(true));
  // cov(0) + 2 Σ_{k>=1} |cov(k)| = 2/3 since every cov(k) > 0.
  const double bound_mh = 2.0 / 3.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> d(1 + trial % 40);
    double norm2 = 0.0;
    for (double& x : d) {
      x = normal(gen);
      norm2 += x * x;
    }
    CHECK(quadratic_form_variance(d, mh) <= bound_mh * norm2 * (1 + 1e-12));

    // Atom recursion against the double sum.
    double direct = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j)
        direct += d[i] * d[j] * walk.cov(static_cast<long>(i) - static_cast<long>(j));
    CHECK_THAT(quadratic_form_variance(d, walk), WithinAbs(direct, 1e-10 * (1 + norm2)));
  }
}

TEST_CASE("fbm_cov", "[oracle]") {
  CHECK_THAT(fbm_cov(1, 1, 1.5, 2.0 / 3.0), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK(fbm_cov(0, 0.7, 1.5, 1.0) == 0.0);
  const double entry = fbm_cov(0.25, 1, 1.5, 2.0 / 3.0);
  CHECK_THAT(entry, WithinAbs((1.0 / 3.0) * (0.125 + 1 - std::pow(0.75, 1.5)), 1e-15));
  CHECK_THAT(entry, WithinAbs(0.15850, 1e-5));
  CHECK_THAT(fbm_cov(0.3, 0.8, 1.0, 2.0), WithinAbs(0.6, 1e-15));
  CHECK(fbm_cov(0.3, 0.8, 1.3, 1.0) == fbm_cov(0.8, 0.3, 1.3, 1.0));
}

TEST_CASE("fbm_cov is positive semidefinite", "[oracle]") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> betas(0.05, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int size = 2 + trial % 7;
    const double beta = betas(gen);
    std::vector<double> t(size);
    for (double& x : t) x = unit(gen);
    Eigen::MatrixXd m(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) m(i, j) = fbm_cov(t[i], t[j], beta, 1.0);
    const double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
    INFO("beta=" << beta << " size=" << size);
    CHECK(smallest >= -1e-10);
  }
}

TEST_CASE("finite_n_variance_ratio", "[oracle]") {
  const CovarianceModel mh = CovarianceModel::mh(test::mh11());
  CHECK_THAT(finite_n_variance_ratio(mh, 5000), WithinRel(2.0 / 3.0, 0.02));
  for (long n : {1L, 2L, 7L}) {
    double direct = 0.0;
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) direct += mh.cov(i - j);
    CHECK_THAT(finite_n_variance_ratio(mh, n), WithinAbs(direct / n, 1e-14));
  }
}

TEST_CASE("limit_targets", "[oracle]") {
  const LimitTargets mh = limit_targets(test::mh11(), CoefficientFamily(FracInt{0.25}));
  CHECK_THAT(mh.sigma2, WithinAbs(2.0 / 3.0, 1e-14));
  CHECK_THAT(mh.two_pi_h0, WithinAbs(8.0 / 3.0, 1e-14));
  CHECK_THAT(*mh.eta_alternative, WithinAbs(4.0 / 3.0, 1e-14));
  CHECK_THAT(*mh.beta, WithinAbs(1.5, 1e-15));
  CHECK_THAT(*mh.hurst, WithinAbs(0.75, 1e-15));
  CHECK_FALSE(mh.abs_sum);

  const LimitTargets walk = limit_targets(test::z6_walk(true), CoefficientFamily(Geometric{0.5, 1.0}));
  CHECK_THAT(walk.sigma2, WithinAbs(1.5, 1e-14));
  CHECK_THAT(walk.two_pi_h0, WithinAbs(6.0, 1e-14));
  CHECK_THAT(*walk.blocked_projection, WithinAbs(27.0 / 8.0, 1e-14));
  CHECK_THAT(*walk.abs_sum, WithinAbs(2.0, 1e-15));
}

TEST_CASE("an atom at t = 1 is a condition error", "[oracle]") {
  CHECK_THROWS_AS(group_2pi_h0(atoms({{1.0, 0.5}})), ConditionError);
}
