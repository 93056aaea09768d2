#include <cmath>
#include <vector>

#include "doctest.h"
#include "multisum/errors.hpp"
#include "multisum/rosenthal.hpp"
#include "multisum/simulate.hpp"
#include "multisum/verifier.hpp"
#include "oracles.hpp"

using namespace multisum;
using doctest::Approx;

namespace {

DegenerateKernel rank1(FactorFamily f, int d = 2, double w = 1.0) {
  std::vector<FactorFamily> fs(d, f);
  return DegenerateKernel(fs, {{std::vector<int>(d, 1), w}}, true);
}

}  // namespace

TEST_SUITE("nclt_verifier") {
  TEST_CASE("rectangular NCLT, Gaussian rank-one kernel") {
    auto k = rank1(FactorFamily::hermite());
    auto r = verify_rect_nclt(k, k.axes(), {4, 16, 64}, RngSpec{1});
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.final_below_threshold);
    CHECK(r.ks_nonincreasing);
    CHECK(r.variance_consistent);
    CHECK(r.noise_budget == Approx(2 * ks_critical(20000, 100000)));
    for (const auto& s : r.stages) {
      CHECK(s.ks >= 0);
      CHECK(s.ks <= 1);
      CHECK(s.kappa_minus == 0);
    }
  }

  TEST_CASE("Hermite-2 factors: finite-size effect shrinks with n") {
    DegenerateKernel k({FactorFamily::hermite(), FactorFamily::hermite()}, {{{2, 2}, 1.0}}, true);
    auto r = verify_rect_nclt(k, k.axes(), {1, 4, 64}, RngSpec{2});
    CHECK(r.stages.front().ks > 0.1);
    CHECK(r.stages.back().ks < r.stages.front().ks);
    CHECK(r.verdict == Verdict::pass);
  }

  TEST_CASE("Rademacher rank-one kernel at size 1 is far from the limit") {
    auto k = rank1(FactorFamily::rademacher_sign());
    auto r = verify_rect_nclt(k, k.axes(), {1}, RngSpec{3});
    CHECK(r.stages[0].ks > 0.1);
    CHECK(r.verdict == Verdict::fail);
  }

  TEST_CASE("d = 1 reduces to the classical CLT") {
    DegenerateKernel k({FactorFamily::centered_exponential_poly()}, {{{1}, 1.0}}, true);
    auto r = verify_rect_nclt(k, k.axes(), {4, 64, 1024}, RngSpec{4});
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.stages[0].ks > r.stages[2].ks);
  }

  TEST_CASE("preconditions") {
    auto k = rank1(FactorFamily::hermite(), 2, 0.0);
    CHECK_THROWS_AS(verify_rect_nclt(k, k.axes(), {4}, RngSpec{1}), PreconditionError);
    DegenerateKernel raw({FactorFamily::hermite(), FactorFamily::hermite()}, {{{1, 1}, 1.0}}, false);
    CHECK_THROWS_AS(verify_rect_nclt(raw, raw.axes(), {4}, RngSpec{1}), PreconditionError);
  }

  TEST_CASE("irregular pipeline") {
    auto k = rank1(FactorFamily::hermite());
    std::vector<IndexSet> rects{cube(2, 4), cube(2, 16), cube(2, 64)};
    auto a = verify_irregular_nclt(k, k.axes(), rects, RngSpec{5});
    auto b = verify_rect_nclt(k, k.axes(), {4, 16, 64}, RngSpec{5});
    CHECK(a.verdict == b.verdict);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.stages[i].ks == b.stages[i].ks);

    std::vector<IndexSet> ls;
    for (int n : {8, 16, 32, 64}) ls.push_back(lshape_fixed_fraction(n));
    auto l = verify_irregular_nclt(k, k.axes(), ls, RngSpec{6});
    CHECK(l.verdict == Verdict::hypotheses_not_met);
    REQUIRE(l.conditions.has_value());
    CHECK_FALSE(l.conditions->any_met());

    std::vector<IndexSet> sm;
    for (int n : {8, 16, 32, 64}) sm.push_back(square_minus_corner(n));
    auto s = verify_irregular_nclt(k, k.axes(), sm, RngSpec{7});
    CHECK(s.verdict == Verdict::pass);
  }

  TEST_CASE("summarize_stages uses the noise budget") {
    ConvergenceReport r;
    r.stages.resize(3);
    r.stages[0].ks = 0.04;
    r.stages[1].ks = 0.045;  // rise below the budget
    r.stages[2].ks = 0.03;
    VerifyOptions o;
    summarize_stages(r, o);
    CHECK(r.ks_nonincreasing);
    CHECK(r.verdict == Verdict::pass);
    r.stages[1].ks = 0.2;
    summarize_stages(r, o);
    CHECK_FALSE(r.ks_nonincreasing);
    CHECK(r.verdict == Verdict::fail);
    r.stages[1].ks = 0.03;
    r.stages[2].ks = 0.06;
    summarize_stages(r, o);
    CHECK_FALSE(r.final_below_threshold);
  }

  TEST_CASE("scale equivariance") {
    auto k = rank1(FactorFamily::hermite());
    auto L = IndexSet::staircase({6, 5, 3});
    auto a = simulate_S_L(k, L, 2000, RngSpec{8});
    auto b = simulate_S_L(k.scaled(3.0), L, 2000, RngSpec{8});
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b.values()[i] == Approx(3 * a.values()[i]).epsilon(1e-14));
    VerifyOptions o;
    o.n = 5000;
    o.n_limit = 20000;
    auto r1 = verify_rect_nclt(k, k.axes(), {2, 8}, RngSpec{9}, o);
    auto r3 = verify_rect_nclt(k.scaled(3.0), k.axes(), {2, 8}, RngSpec{9}, o);
    for (std::size_t i = 0; i < 2; ++i) CHECK(r1.stages[i].ks == r3.stages[i].ks);
  }

  TEST_CASE("moment sandwich") {
    auto k = rank1(FactorFamily::hermite());
    VerifyOptions o;
    o.n = 100000;
    auto one = verify_moment_sandwich(k, k.axes(), {make_rect({1, 1})}, {2, 3, 4}, RngSpec{10}, o);
    CHECK(one.rank_one);
    for (const auto& row : one.rows) {
      CHECK(row.lower == Approx(std::pow(oracle::normal_norm(row.p), 2)).epsilon(1e-9));
      CHECK(std::abs(row.empirical.value - row.lower) <= 3 * row.empirical.standard_error);
      CHECK(row.lower_ok);
      CHECK(row.upper_ok);
    }
    CHECK(one.rows[0].lower == Approx(1.0).epsilon(1e-12));
    CHECK(one.rows[0].upper == Approx(1.0).epsilon(1e-12));
    CHECK(one.pass);

    // non rank-one: no lower route
    DegenerateKernel two({FactorFamily::hermite(), FactorFamily::hermite()},
                         {{{1, 1}, 0.6}, {{2, 2}, 0.8}}, true);
    auto t = verify_moment_sandwich(two, two.axes(), {make_rect({4, 4})}, {2, 4}, RngSpec{11}, o);
    CHECK_FALSE(t.rank_one);
    CHECK(std::isnan(t.rows[0].lower));
    CHECK(t.rows[0].upper_ok);
  }

  TEST_CASE("shape fit helper recovers a known exponent") {
    std::vector<double> p, v;
    for (double q = 4; q <= 16; q += 1) {
      p.push_back(q);
      v.push_back(3.0 * std::pow(q / std::log(q), 2.5));
    }
    CHECK(fit_p_over_log_exponent(p, v, 4, 16) == Approx(2.5).epsilon(1e-10));
  }

  TEST_CASE("domination chain: empirical <= W bound <= trivial route") {
    auto k = rank1(FactorFamily::hermite());
    TruncatedDegenerate t(k);
    for (int n : {3, 10}) {
      auto L = make_rect({n, n});
      auto s = simulate_S_L(k, L, 100000, RngSpec{12});
      for (double p : {2.0, 4.0, 6.0}) {
        auto e = empirical_moment(s, p);
        auto w = theorem_w_bound(t, p, L.cardinality(), 2);
        double f = std::pow(oracle::normal_norm(p), 2);
        CHECK(e.value <= w.value + 3 * e.standard_error);
        if (trivial_bound(f, p, L.cardinality()) > w.value) CHECK(w.value <= trivial_bound(f, p, L.cardinality()));
      }
    }
  }

  TEST_CASE("tail domination, Gaussian rank-one kernel") {
    auto k = rank1(FactorFamily::hermite());
    std::vector<double> pg;
    for (int i = 0; i < 25; ++i) pg.push_back(2 * std::pow(64.0, i / 24.0));
    auto psi = kernel_composite_psi(k, pg);
    VerifyOptions o;
    o.n = 20000;
    auto r = verify_tail_domination(k, k.axes(), {make_rect({1, 1}), make_rect({8, 8})}, psi, 1.0,
                                    RngSpec{13}, o);
    CHECK(r.pass);
    CHECK(r.violations == 0);
    CHECK(r.checked > 0);
    CHECK(r.threshold == Approx(std::numbers::e));
    CHECK_THROWS_AS(kernel_composite_psi(k, {1.0, 2.0}), DomainError);
  }

  TEST_CASE("log-Weibull envelope") {
    double beta = 1.0;
    auto ax = AxisDistribution::log_weibull(beta);
    auto f = FactorFamily::standardized_identity(0.0, std::sqrt(ax.variance()));
    DegenerateKernel k({f, f}, {ax, ax}, {{{1, 1}, 1.0}}, true);
    std::vector<double> pg;
    for (int i = 0; i < 20; ++i) pg.push_back(2 * std::pow(16.0, i / 19.0));
    auto psi = kernel_composite_psi(k, pg);
    VerifyOptions o;
    o.n = 20000;
    auto r = verify_tail_domination(k, k.axes(), {make_rect({1, 1}), make_rect({4, 4})}, psi, 1.0,
                                    RngSpec{14}, o, beta);
    REQUIRE(r.envelope.has_value());
    CHECK(r.envelope->exponent == Approx(2.0));
    CHECK(r.envelope->confirmed);
    CHECK(r.violations == 0);
  }
}
