#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "multisum/errors.hpp"
#include "multisum/rosenthal.hpp"
#include "multisum/tabulated.hpp"
#include "oracles.hpp"

using namespace multisum;
using doctest::Approx;

namespace {

DegenerateKernel hermite_rank1(double w = 1.0) {
  return DegenerateKernel({FactorFamily::hermite(), FactorFamily::hermite()}, {{{1, 1}, w}}, true);
}

// Eigenvalues of the weighted symmetric kernel matrix, descending; an
// eigen-solver route independent of the SVD used by the library.
std::vector<double> weighted_eigenvalues(const TabulatedKernel& tk) {
  const auto n = static_cast<Eigen::Index>(tk.x().size());
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::sqrt(tk.x().weights[i]);
  Eigen::MatrixXd b = s.asDiagonal() * tk.values() * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  for (double& e : ev) e = std::abs(e);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

}  // namespace

TEST_SUITE("rosenthal_bounds") {
  TEST_CASE("Rosenthal function") {
    CHECK(rosenthal_K(2) == 1.0);
    CHECK(rosenthal_K(std::numbers::e) == Approx(1.77638).epsilon(1e-12));
    double p0 = 33.4610;
    CHECK(rosenthal_K(p0) == Approx(1.77638 * p0 / (std::numbers::e * std::log(p0))).epsilon(1e-12));
    CHECK(rosenthal_K(p0) == Approx(6.2291).epsilon(1e-4));
    CHECK_THROWS_AS(rosenthal_K(1.5), DomainError);
    for (double p = 2.01; p < 100; p *= 1.3) CHECK(rosenthal_K(p) >= 1.0);
    // nondecreasing from e on
    for (double p = std::numbers::e; p < 1e4; p *= 1.5) CHECK(rosenthal_K(p * 1.5) >= rosenthal_K(p));
  }

  TEST_CASE("trivial bound") {
    CHECK(trivial_bound(0, 2, 7) == 0.0);
    CHECK(trivial_bound(1, 2, 4) == 2.0);
    CHECK(trivial_bound(3.5, 4, 9) == Approx(3 * 3.5));
    CHECK(trivial_bound(2.0, 3, 25) == Approx(2 * trivial_bound(1.0, 3, 25)));
  }

  TEST_CASE("Klesov product bound") {
    std::vector<double> ones{1, 1};
    CHECK(klesov_bound(ones, 2) == 1.0);
    std::vector<double> one{1};
    CHECK(klesov_bound(one, 4) == Approx(1.8855).epsilon(1e-4));
    CHECK(klesov_bound(ones, 4) == Approx(oracle::rosenthal_K(4) * oracle::rosenthal_K(4)).epsilon(1e-12));
    CHECK(klesov_bound(ones, 4) == Approx(3.5554).epsilon(1e-4));
  }

  TEST_CASE("D_p quasi-norm of the given representation") {
    CHECK(dp_quasinorm(hermite_rank1(), 2) == Approx(1.0).epsilon(1e-10));
    DegenerateKernel diag({FactorFamily::hermite(), FactorFamily::hermite()},
                          {{{1, 1}, 0.6}, {{2, 2}, 0.4}}, true);
    CHECK(dp_quasinorm(diag, 2) == Approx(1.0).epsilon(1e-10));
    // p = 4: 0.6 * 3^{1/2} + 0.4 * |h2|_4^2, |h2|_4^4 = E (x^2-1)^4 / 4 = 60 / 4
    double h2 = std::pow(15.0, 0.25);
    CHECK(dp_quasinorm(diag, 4) == Approx(0.6 * std::sqrt(3.0) + 0.4 * h2 * h2).epsilon(1e-8));
  }

  TEST_CASE("D_p surrogate is dominated by the product of factor psi when sum |lambda| <= 1") {
    DegenerateKernel k({FactorFamily::hermite(), FactorFamily::hermite()},
                       {{{1, 1}, 0.5}, {{1, 2}, -0.3}, {{2, 1}, 0.2}}, true);
    for (double p : {2.0, 3.0, 4.0, 6.0}) {
      double g = std::max(factor_moment(FactorFamily::hermite(), 1, AxisDistribution::standard_normal(), p),
                          factor_moment(FactorFamily::hermite(), 2, AxisDistribution::standard_normal(), p));
      CHECK(dp_quasinorm(k, p) <= g * g * (1 + 1e-12));
    }
  }

  TEST_CASE("W bound on an exactly rank-one kernel picks M* = 1") {
    TruncatedDegenerate t(hermite_rank1());
    for (double p : {2.0, 4.0, 8.0}) {
      auto r = theorem_w_bound(t, p, 100, 4);
      REQUIRE(r.m_star.has_value());
      CHECK(*r.m_star == 1);
      double g = oracle::normal_norm(p);
      std::vector<double> fm{g, g};
      CHECK(r.value == Approx(klesov_bound(fm, p)).epsilon(1e-8));
      CHECK(r.route == BoundRoute::theorem_w);
    }
    CHECK_THROWS_AS(theorem_w_bound(t, 2, 1, 0), ArgumentError);
  }

  TEST_CASE("W bound: M* nondecreasing in |L|") {
    TabulatedApproximable tk(TabulatedKernel::brownian_min(48).double_centered());
    int prev = 0;
    for (std::uint64_t l : {1ull, 100ull, 10000ull, 1000000ull}) {
      auto r = theorem_w_bound(tk, 2, l, 12);
      CHECK(*r.m_star >= prev);
      prev = *r.m_star;
    }
    CHECK(prev > 1);
  }

  TEST_CASE("W bound for the centred Brownian kernel matches an eigenvalue brute force") {
    auto tk = TabulatedKernel::brownian_min(128).double_centered();
    auto ev = weighted_eigenvalues(tk);
    TabulatedApproximable ap(tk);
    const std::uint64_t l = 100;
    const int m_max = 16;
    double best = 1e300;
    for (int m = 1; m <= m_max; ++m) {
      double head = 0, tail = 0;
      for (int k = 0; k < m; ++k) head += ev[k];
      for (std::size_t k = m; k < ev.size(); ++k) tail += ev[k] * ev[k];
      best = std::min(best, head + std::sqrt(double(l)) * std::sqrt(tail));
    }
    auto r = theorem_w_bound(ap, 2, l, m_max);
    CHECK(std::abs(r.value / best - 1) < 0.02);
  }

  TEST_CASE("bounds nondecreasing in p") {
    TruncatedDegenerate t(hermite_rank1());
    double prev = 0;
    for (double p : {2.0, 3.0, 4.0, 6.0, 8.0, 12.0}) {
      auto r = theorem_w_bound(t, p, 50, 3);
      CHECK(r.value >= prev);
      prev = r.value;
    }
  }
}
