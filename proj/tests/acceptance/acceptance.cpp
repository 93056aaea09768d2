// Acceptance runner: one PASS/FAIL line per criterion.
// Usage: multisum_acceptance [criterion ...]   (no argument runs all eleven)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "multisum/cli.hpp"
#include "multisum/empirical.hpp"
#include "multisum/index_set.hpp"
#include "multisum/kernel.hpp"
#include "multisum/parametric.hpp"
#include "multisum/psi.hpp"
#include "multisum/rosenthal.hpp"
#include "multisum/simulate.hpp"
#include "multisum/tabulated.hpp"
#include "multisum/verifier.hpp"
#include "oracles.hpp"

using namespace multisum;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string f6(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", x);
  return b;
}

DegenerateKernel hermite_rank1(int d) {
  std::vector<FactorFamily> fs(d, FactorFamily::hermite());
  return DegenerateKernel(fs, {{std::vector<int>(d, 1), 1.0}}, true);
}

DegenerateKernel random_orthonormal(std::mt19937_64& gen, int max_k) {
  std::normal_distribution<double> g(0, 1);
  std::vector<std::vector<int>> keys;
  for (int a = 1; a <= max_k; ++a)
    for (int b = 1; b <= max_k; ++b) keys.push_back({a, b});
  std::shuffle(keys.begin(), keys.end(), gen);
  int m = 1 + static_cast<int>(gen() % 4);
  std::vector<KernelTerm> terms;
  for (int i = 0; i < m; ++i) terms.push_back({keys[i], g(gen)});
  return DegenerateKernel({FactorFamily::hermite(), FactorFamily::hermite()}, terms, true);
}

IndexSet union_of_rects(int a, int b, int off) {
  std::vector<std::vector<int>> c;
  for (int i = 1; i <= a; ++i)
    for (int j = 1; j <= a; ++j) c.push_back({i, j});
  for (int i = off; i < off + b; ++i)
    for (int j = off; j < off + b; ++j) c.push_back({i, j});
  return IndexSet::explicit_set(2, c);
}

// ---------------------------------------------------------------- 1

Outcome criterion1() {
  Outcome o;
  std::mt19937_64 gen(41);
  const std::uint64_t n = 100000;
  int checked = 0, bad = 0;
  double worst = 0;
  for (int kk = 0; kk < 10; ++kk) {
    auto k = random_orthonormal(gen, 4);
    const double sigma2 = k.sum_sq_weights();
    std::vector<int> prof;
    for (int i = 0; i < 7; ++i) prof.push_back(1 + static_cast<int>(gen() % 9));
    std::sort(prof.rbegin(), prof.rend());
    std::vector<IndexSet> shapes{
        make_rect({3 + static_cast<int>(gen() % 10), 3 + static_cast<int>(gen() % 10)}),
        IndexSet::staircase(prof),
        union_of_rects(4 + static_cast<int>(gen() % 4), 3, 9),
        square_minus_corner(4 + static_cast<int>(gen() % 6)),
        lshape_fixed_fraction(8),
    };
    for (std::size_t s = 0; s < shapes.size(); ++s) {
      auto dist = simulate_S_L(k, shapes[s], n, RngSpec{1000u + 10u * kk + s});
      auto v = empirical_variance(dist);
      double z = std::abs(v.value - sigma2) / v.standard_error;
      worst = std::max(worst, z);
      ++checked;
      if (z > 3) ++bad;
    }
  }
  o.require(bad == 0, std::to_string(bad) + " of " + std::to_string(checked) + " variances outside 3 SE");
  o.note("MC: " + std::to_string(checked) + " (kernel, set) pairs, worst |z| = " + f6(worst));

  // Exact: all sign assignments, Rademacher axes, |L| <= 9.
  DegenerateKernel rk({FactorFamily::rademacher_sign(), FactorFamily::rademacher_sign()},
                      {{{1, 1}, 1.0}}, true);
  std::vector<IndexSet> small;
  for (int a = 1; a <= 9; ++a)
    for (int b = 1; a * b <= 9; ++b) small.push_back(make_rect({a, b}));
  small.push_back(IndexSet::staircase({4, 3, 2}));
  small.push_back(IndexSet::staircase({3, 2, 1, 1, 1}));
  small.push_back(IndexSet::explicit_set(2, {{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}, {6, 6}, {7, 7}, {8, 8}, {9, 9}}));
  small.push_back(IndexSet::explicit_set(2, {{1, 1}, {1, 5}, {3, 2}, {4, 4}, {4, 5}, {6, 1}}));
  int exact_bad = 0;
  for (const auto& L : small) {
    auto mx = L.max_coords();
    int vars = mx[0] + mx[1];
    std::vector<std::vector<double>> x(2);
    x[0].resize(mx[0]);
    x[1].resize(mx[1]);
    long long sum_sq = 0;
    for (std::uint32_t bits = 0; bits < (1u << vars); ++bits) {
      for (int i = 0; i < mx[0]; ++i) x[0][i] = (bits >> i & 1) ? -1.0 : 1.0;
      for (int j = 0; j < mx[1]; ++j) x[1][j] = (bits >> (mx[0] + j) & 1) ? -1.0 : 1.0;
      double t = compute_S_L(rk, L, x) * std::sqrt(double(L.cardinality()));
      long long ti = std::llround(t);
      if (std::abs(t - double(ti)) > 1e-9) ++exact_bad;
      sum_sq += ti * ti;
    }
    // E T^2 = |L| exactly, i.e. Var S_L = lambda^2 = 1
    if (sum_sq != static_cast<long long>(L.cardinality()) << vars) ++exact_bad;
  }
  o.require(exact_bad == 0, "exact enumeration mismatch on " + std::to_string(exact_bad) + " sets");
  o.note("exact: " + std::to_string(small.size()) + " Rademacher sets with |L| <= 9");
  return o;
}

// ---------------------------------------------------------------- 2

// Sets with |L| <= 9 up to row/column permutation: rows ordered by length
// (nonincreasing), columns numbered by first appearance.
struct Enumerator {
  std::vector<unsigned> rows;
  std::function<void(const std::vector<unsigned>&, int)> visit;
  void rec(int cols, int budget, int last) {
    if (!rows.empty()) visit(rows, cols);
    for (int b = std::min(last, budget); b >= 1; --b)
      for (int j = 0; j <= std::min(b, cols); ++j) {
        int fresh = b - j;
        if (cols + fresh > 9 || (rows.empty() && j > 0)) continue;
        for (unsigned s = 0; s < (1u << cols); ++s) {
          if (__builtin_popcount(s) != j) continue;
          rows.push_back(s | (((1u << fresh) - 1) << cols));
          rec(cols + fresh, budget - b, b);
          rows.pop_back();
        }
      }
  }
};

// E T^4 * 2^r for T = sum_{(i,j) in L} x_i y_j: average over x of
// E_y (u . y)^4 = 3 (sum u^2)^2 - 2 sum u^4 with u = A^T x.
long long fourth_moment_scaled(const std::vector<unsigned>& rows, int cols) {
  const int r = static_cast<int>(rows.size());
  long long tot = 0;
  for (unsigned x = 0; x < (1u << r); ++x) {
    long long s2 = 0, s4 = 0;
    for (int j = 0; j < cols; ++j) {
      long long u = 0;
      for (int i = 0; i < r; ++i)
        if (rows[i] >> j & 1) u += (x >> i & 1) ? -1 : 1;
      s2 += u * u;
      s4 += u * u * u * u;
    }
    tot += 3 * s2 * s2 - 2 * s4;
  }
  return tot;
}

Outcome criterion2() {
  Outcome o;
  const double bound = std::pow(rosenthal_K(4.0), 2);  // |g|_4 = |h|_4 = 1 for signs
  DegenerateKernel rk({FactorFamily::rademacher_sign(), FactorFamily::rademacher_sign()},
                      {{{1, 1}, 1.0}}, true);
  long long sets = 0, over = 0, cross = 0, cross_bad = 0;
  double worst = 0;
  Enumerator e;
  e.visit = [&](const std::vector<unsigned>& rows, int cols) {
    ++sets;
    long long card = 0;
    for (unsigned m : rows) card += __builtin_popcount(m);
    const int r = static_cast<int>(rows.size());
    double m4 = double(fourth_moment_scaled(rows, cols)) / double(1u << r);
    double norm = std::pow(m4, 0.25) / std::sqrt(double(card));
    worst = std::max(worst, norm);
    if (norm > bound) ++over;
    // every sign assignment through the library path where 2^(r+c) is small
    if (r + cols <= 11) {
      std::vector<std::vector<int>> cells;
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < cols; ++j)
          if (rows[i] >> j & 1) cells.push_back({i + 1, j + 1});
      auto L = IndexSet::explicit_set(2, cells);
      std::vector<std::vector<double>> x{std::vector<double>(r), std::vector<double>(cols)};
      double acc = 0;
      for (unsigned bits = 0; bits < (1u << (r + cols)); ++bits) {
        for (int i = 0; i < r; ++i) x[0][i] = (bits >> i & 1) ? -1.0 : 1.0;
        for (int j = 0; j < cols; ++j) x[1][j] = (bits >> (r + j) & 1) ? -1.0 : 1.0;
        double s = compute_S_L(rk, L, x);
        acc += s * s * s * s;
      }
      double full = std::pow(acc / double(1u << (r + cols)), 0.25);
      ++cross;
      if (std::abs(full - norm) > 1e-12 * norm) ++cross_bad;
    }
  };
  e.rec(0, 9, 9);
  o.require(over == 0, std::to_string(over) + " sets exceed K(4)^2");
  o.require(cross_bad == 0, std::to_string(cross_bad) + " closed-form / full-enumeration mismatches");
  o.note(std::to_string(sets) + " sets, max |S_L|_4 = " + f6(worst) + " <= K(4)^2 = " + f6(bound) +
         ", " + std::to_string(cross) + " cross-checked by full enumeration");

  // MC at |L| = 10^4
  std::vector<IndexSet> big{make_rect({100, 100}), make_rect({400, 25})};
  std::vector<int> prof;
  for (int i = 0; i < 140; ++i) prof.push_back(140 - i);  // 9870 cells
  int extra = 10000 - 9870;
  for (int i = 0; extra > 0; ++i, --extra) ++prof[i];
  std::sort(prof.rbegin(), prof.rend());
  big.push_back(IndexSet::staircase(prof));
  for (std::size_t i = 0; i < big.size(); ++i) {
    if (big[i].cardinality() != 10000) o.require(false, "MC set size");
    auto dist = simulate_S_L(rk, big[i], 10000, RngSpec{2200u + i});
    auto m = empirical_moment(dist, 4.0);
    o.require(m.value <= bound + 3 * m.standard_error, "MC |S_L|_4 above K(4)^2 + 3 SE");
    o.note("MC " + big[i].kind_name() + ": " + f6(m.value) + " +- " + f6(m.standard_error));
  }
  return o;
}

// ---------------------------------------------------------------- 3

Outcome criterion3() {
  Outcome o;
  VerifyOptions vo;
  vo.n = 20000;
  vo.n_limit = 100000;
  auto check = [&](int d, std::vector<int> sizes, std::uint64_t seed) {
    auto k = hermite_rank1(d);
    auto r = verify_rect_nclt(k, k.axes(), sizes, RngSpec{seed}, vo);
    std::string ks;
    for (const auto& s : r.stages) ks += (ks.empty() ? "" : ",") + f6(s.ks);
    o.require(r.ks_nonincreasing, "d=" + std::to_string(d) + " KS rises beyond the noise budget");
    o.require(r.final_below_threshold, "d=" + std::to_string(d) + " final KS > 0.05");
    o.note("d=" + std::to_string(d) + " KS [" + ks + "] budget " + f6(r.noise_budget));
  };
  check(2, {4, 16, 64}, 3001);
  check(3, {4, 8, 16}, 3002);
  return o;
}

// ---------------------------------------------------------------- 4

Outcome criterion4() {
  Outcome o;
  auto k = hermite_rank1(2);
  std::vector<IndexSet> minus, plus, ls;
  for (int n : {8, 16, 32, 64}) {
    minus.push_back(square_minus_corner(n));
    plus.push_back(square_plus_cell(n));
    ls.push_back(lshape_fixed_fraction(n));
  }
  auto m = verify_irregular_nclt(k, k.axes(), minus, RngSpec{4001}, {}, "square_minus_corner");
  o.require(m.verdict == Verdict::pass, "squares minus corner: " + verdict_name(m.verdict));
  o.require(m.stages.back().ks <= 0.05, "squares minus corner final KS");
  o.require(m.stages.back().kappa_plus < m.stages.front().kappa_plus && m.stages.back().kappa_plus < 0.1,
            "kappa_plus does not vanish");
  o.note("minus-corner kappa_plus " + f6(m.stages.front().kappa_plus) + " -> " +
         f6(m.stages.back().kappa_plus) + ", final KS " + f6(m.stages.back().ks));

  auto p = verify_irregular_nclt(k, k.axes(), plus, RngSpec{4002}, {}, "square_plus_cell");
  o.require(p.verdict == Verdict::pass, "squares plus cell: " + verdict_name(p.verdict));
  o.require(p.stages.back().kappa_minus < 0.1, "kappa_minus does not vanish");
  o.note("plus-cell kappa_minus " + f6(p.stages.front().kappa_minus) + " -> " +
         f6(p.stages.back().kappa_minus) + ", final KS " + f6(p.stages.back().ks));

  auto l = verify_irregular_nclt(k, k.axes(), ls, RngSpec{4003}, {}, "lshape_fixed_fraction");
  o.require(l.verdict == Verdict::hypotheses_not_met, "L-shape not flagged");
  double kmin = 1e300;
  for (const auto& s : l.stages) kmin = std::min(kmin, s.kappa_minus);
  o.require(kmin >= 0.3, "L-shape kappa_minus below 0.3");
  o.note("L-shape min kappa_minus " + f6(kmin));
  return o;
}

// ---------------------------------------------------------------- 5

Outcome criterion5() {
  Outcome o;
  auto tk = TabulatedKernel::brownian_min(256);
  auto sd = spectral_decompose(tk);
  double worst = 0;
  for (int k = 1; k <= 5; ++k) {
    double exact = 4 / (std::numbers::pi * std::numbers::pi * (2 * k - 1) * (2 * k - 1));
    worst = std::max(worst, std::abs(sd.singular_values[k - 1] / exact - 1));
  }
  o.require(worst <= 0.01, "eigenvalue error " + f6(worst));
  auto a1 = degenerate_approx(tk, sd, 1, 2.0);
  double tail = 0.5 - 4 / (std::numbers::pi * std::numbers::pi);
  double rel = std::abs(a1.trace_tail / tail - 1);
  o.require(rel <= 0.02, "trace tail " + f6(a1.trace_tail));
  double prev = 1e300;
  bool mono = true;
  for (int m = 1; m <= 12; ++m) {
    double q = degenerate_approx(tk, sd, m, 2.0).q;
    mono = mono && q <= prev;
    prev = q;
  }
  o.require(mono, "Q_M not monotone");
  o.note("max eigen rel err " + f6(worst) + ", trace tail " + f6(a1.trace_tail) + " (rel " + f6(rel) + ")");
  return o;
}

// ---------------------------------------------------------------- 6

Outcome criterion6() {
  Outcome o;
  double worst_v = 0, worst_t = 0;
  int underflow = 0;
  for (double m : {1.0, 2.0, 4.0}) {
    auto psi = PsiFunction::power_log(m);
    for (int i = 0; i <= 40; ++i) {
      double x = 1 + 0.1 * i;
      double exact = std::exp(m * x - 1) / m;
      worst_v = std::max(worst_v, std::abs(young_fenchel(psi, x) / exact - 1));
    }
    TailBound tb{1.0, psi};
    for (int i = 0; i <= 40; ++i) {
      double y = std::numbers::e + (10 - std::numbers::e) * i / 40.0;
      double exact_log = -std::pow(y, m) / (m * std::numbers::e);
      double got = tail_bound_eval(tb, y);
      if (exact_log < -700) {
        // below the double range: the bound must underflow as well
        ++underflow;
        if (got > 1e-300) worst_t = std::max(worst_t, 1.0);
        continue;
      }
      worst_t = std::max(worst_t, std::abs(got / std::exp(exact_log) - 1));
    }
  }
  o.require(worst_v <= 1e-3, "conjugate rel err " + f6(worst_v));
  o.require(worst_t <= 5e-3, "tail rel err " + f6(worst_t));
  o.note("max rel err v* " + f6(worst_v) + ", tail " + f6(worst_t) + " (y in [e, 10], " + std::to_string(underflow) +
         " points below the double range)");
  return o;
}

// ---------------------------------------------------------------- 7

Outcome criterion7() {
  Outcome o;
  auto k = hermite_rank1(2);
  std::vector<double> pg;
  for (int i = 0; i < 25; ++i) pg.push_back(2 * std::pow(64.0, i / 24.0));
  auto psi = kernel_composite_psi(k, pg);
  std::vector<IndexSet> sets{make_rect({1, 1}), make_rect({4, 4}), IndexSet::staircase({6, 5, 3, 1}),
                             square_minus_corner(10), make_rect({32, 32})};
  VerifyOptions vo;
  vo.n = 100000;
  auto r = verify_tail_domination(k, k.axes(), sets, psi, 1.0, RngSpec{7001}, vo);
  o.require(r.violations == 0, std::to_string(r.violations) + " violations");
  o.require(r.checked > 0, "no points checked");
  o.require(r.pass, "report did not pass");
  double worst = 0;
  for (const auto& s : r.sets) worst = std::max(worst, s.worst_ratio);
  o.note(std::to_string(r.checked) + " points checked, worst empirical/bound " + f6(worst));
  return o;
}

// ---------------------------------------------------------------- 8

Outcome criterion8() {
  Outcome o;
  std::mt19937_64 gen(8);
  std::normal_distribution<double> g(0, 1);
  int bad = 0;
  double worst = 0;
  for (int rep = 0; rep < 200; ++rep) {
    int d = 2 + rep % 2;
    std::vector<FactorFamily> fs(d, FactorFamily::hermite());
    std::vector<KernelTerm> terms;
    std::set<std::vector<int>> used;
    int m = 1 + static_cast<int>(gen() % 4);
    while (static_cast<int>(terms.size()) < m) {
      std::vector<int> key(d);
      for (auto& c : key) c = 1 + static_cast<int>(gen() % 4);
      if (used.insert(key).second) terms.push_back({key, g(gen)});
    }
    DegenerateKernel k(fs, terms, true);
    std::vector<int> sides(d);
    for (auto& s : sides) s = 1 + static_cast<int>(gen() % (d == 2 ? 40 : 12));
    auto L = make_rect(sides);
    std::vector<std::vector<double>> x(d);
    for (int s = 0; s < d; ++s)
      for (int i = 0; i < sides[s]; ++i) x[s].push_back(g(gen));
    double fast = compute_S_L(k, L, x), naive = compute_S_L_naive(k, L, x);
    double err = std::abs(fast - naive) / std::max(1.0, std::abs(naive));
    worst = std::max(worst, err);
    if (err > 1e-12) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " of 200 instances differ by more than 1e-12");

  // n = 512 per axis, d = 2, rank 4
  DegenerateKernel k({FactorFamily::hermite(), FactorFamily::hermite()},
                     {{{1, 1}, 0.5}, {{2, 3}, 0.5}, {{3, 4}, 0.5}, {{4, 2}, 0.5}}, true);
  auto L = make_rect({512, 512});
  std::vector<std::vector<double>> x(2);
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 512; ++i) x[s].push_back(g(gen));
  using clock = std::chrono::steady_clock;
  volatile double sink = 0;
  auto t0 = clock::now();
  const int fast_reps = 200;
  for (int i = 0; i < fast_reps; ++i) sink = sink + compute_S_L(k, L, x);
  double t_fast = std::chrono::duration<double>(clock::now() - t0).count() / fast_reps;
  t0 = clock::now();
  const int naive_reps = 3;
  for (int i = 0; i < naive_reps; ++i) sink = sink + compute_S_L_naive(k, L, x);
  double t_naive = std::chrono::duration<double>(clock::now() - t0).count() / naive_reps;
  double speedup = t_naive / t_fast;
  o.require(speedup >= 100, "speedup " + f6(speedup));
  o.note("worst rel diff " + f6(worst) + ", speedup " + f6(speedup) + "x (" + f6(t_naive * 1e3) +
         " ms vs " + f6(t_fast * 1e3) + " ms)");
  return o;
}

// ---------------------------------------------------------------- 9

Outcome criterion9() {
  Outcome o;
  std::vector<double> pts;
  for (int i = 0; i <= 10; ++i) pts.push_back(i / 10.0);
  DistanceFn dist = [&](std::size_t a, std::size_t b) { return std::abs(pts[a] - pts[b]); };
  std::vector<double> eps;
  for (int i = 0; i <= 40; ++i) eps.push_back(0.01 + 0.99 * i / 40.0);
  auto prof = covering_profile(pts.size(), dist, eps);
  int mismatch = 0;
  for (const auto& row : prof.rows) {
    int ref = oracle::brute_min_cover(pts.size(), dist, row.eps);
    if (!row.exact || static_cast<int>(row.n) != ref) ++mismatch;
  }
  o.require(mismatch == 0, std::to_string(mismatch) + " covering numbers differ from exhaustive search");

  std::vector<double> ge, gn;
  for (int i = 0; i <= 400; ++i) {
    double e = std::pow(10.0, -8.0 * (1 - i / 400.0));
    ge.push_back(e);
    gn.push_back(1 / (2 * e));
  }
  auto integral = entropy_integral_power(EntropyProfile::from_counts(ge, gn), 2.0);
  double rel = std::abs(integral.value / std::sqrt(2.0) - 1);
  o.require(!integral.divergent && rel <= 0.03, "integral " + f6(integral.value));

  // Hoelder: rho = |u - v|^{1/2} on [0, 1] gives N ~ eps^{-1/alpha} = eps^{-2}
  std::vector<double> u;
  for (int i = 0; i < 400; ++i) u.push_back(i / 399.0);
  DistanceFn hd = [&](std::size_t a, std::size_t b) { return std::sqrt(std::abs(u[a] - u[b])); };
  std::vector<double> he;
  for (int i = 0; i <= 20; ++i) he.push_back(0.08 * std::pow(0.5 / 0.08, i / 20.0));
  auto hp = covering_profile(u.size(), hd, he);
  double slope = fit_entropy_exponent(hp, 0.08, 0.5);
  o.require(std::abs(slope / 2.0 - 1) <= 0.15, "Hoelder slope " + f6(slope));
  o.note("covers exact on " + std::to_string(prof.rows.size()) + " radii, integral " + f6(integral.value) +
         " (rel " + f6(rel) + "), Hoelder slope " + f6(slope) + " vs 2");
  return o;
}

// ---------------------------------------------------------------- 10

Outcome criterion10() {
  Outcome o;
  DegenerateKernel k({FactorFamily::hermite(), FactorFamily::hermite()},
                     {{{1, 1}, 0.6}, {{1, 2}, 0.48}, {{2, 1}, 0.64}}, true);
  std::vector<ParametricEntry> one;
  for (const auto& t : k.terms()) one.push_back({0, t.k, t.w});
  ParametricKernel single({{0.0}}, k.factors(), one, true);
  auto L = IndexSet::staircase({7, 6, 4, 2});
  auto field = simulate_Q_L(single, L, single.axes(), 20000, RngSpec{10001});
  auto scalar = simulate_S_L(k, L, 20000, RngSpec{10001});
  o.require(field.marginal(0).values() == scalar.values(), "singleton field differs from scalar simulation");

  // two-point V, limit field covariance
  std::vector<ParametricEntry> two{{0, {1, 1}, 0.8}, {0, {2, 2}, 0.6},
                                   {1, {1, 1}, 0.3}, {1, {2, 2}, 0.5}, {1, {1, 3}, 0.7}};
  ParametricKernel pk({{0.0}, {1.0}}, {FactorFamily::hermite(), FactorFamily::hermite()}, two, true);
  auto lim = sample_Q_infty(pk, 100000, RngSpec{10002});
  auto cov = empirical_covariance(lim.paths[0], lim.paths[1]);
  double exact = 0.8 * 0.3 + 0.6 * 0.5;
  o.require(std::abs(cov.value - exact) <= 3 * cov.standard_error,
            "covariance " + f6(cov.value) + " vs " + f6(exact));

  // Hoelder rotation example
  auto hk = holder_rotation_kernel(21, std::numbers::pi / 2);
  ParametricOptions po;
  auto rep = check_parametric_nclt(hk, ParametricLevel::power(2), hk.axes(),
                                   {cube(2, 4), cube(2, 16), cube(2, 64)}, RngSpec{10003}, po);
  o.require(rep.hypotheses_met && !rep.integral.divergent && std::isfinite(rep.integral.value),
            "Hoelder hypotheses not finite");
  o.note("cov " + f6(cov.value) + " +- " + f6(cov.standard_error) + " vs " + f6(exact) +
         ", Hoelder I = " + f6(rep.integral.value) + ", verdict " + verdict_name(rep.verdict));
  return o;
}

// ---------------------------------------------------------------- 11

std::string subcommand_for(const Json& cfg) {
  if (cfg.contains("bound")) return "bound";
  if (cfg.contains("simulate")) return "simulate";
  if (cfg.contains("verify")) return "verify";
  if (cfg.contains("psi")) return "psi";
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion11() {
  Outcome o;
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(MULTISUM_CONFIG_DIR))
    if (e.path().extension() == ".json") configs.push_back(e.path());
  std::sort(configs.begin(), configs.end());
  o.require(!configs.empty(), "no configs");
  auto root = fs::temp_directory_path() / "multisum_acceptance_11";
  for (const auto& cfg_path : configs) {
    std::string sub = subcommand_for(read_json_file(cfg_path));
    std::vector<CommandResult> res;
    std::vector<fs::path> dirs;
    for (unsigned w : {1u, 4u, 16u}) {
      auto dir = root / (cfg_path.stem().string() + "_w" + std::to_string(w));
      fs::remove_all(dir);
      CliOptions opts;
      opts.config = cfg_path;
      opts.out = dir;
      opts.workers = w;
      res.push_back(run_command(sub, opts));
      dirs.push_back(dir);
    }
    bool same = !res[0].files.empty() && res[0].error_json.empty();
    for (std::size_t i = 1; i < res.size(); ++i) {
      same = same && res[i].exit_code == res[0].exit_code && res[i].files == res[0].files;
      for (const auto& [role, name] : res[0].files)
        same = same && slurp(dirs[0] / name) == slurp(dirs[i] / name);
    }
    o.require(same, cfg_path.filename().string() + " differs across worker counts");
  }
  o.note(std::to_string(configs.size()) + " configs x workers {1, 4, 16}");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime limit
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "exact variance identity", 120, criterion1},
    {2, "Klesov domination", 60, criterion2},
    {3, "rectangular NCLT", 180, criterion3},
    {4, "irregular NCLT", 120, criterion4},
    {5, "degenerate approximation", 10, criterion5},
    {6, "Young-Fenchel closed form", 5, criterion6},
    {7, "tail domination", 120, criterion7},
    {8, "factorized sums", 60, criterion8},
    {9, "entropy integrals", 30, criterion9},
    {10, "parametric field consistency", 120, criterion10},
    {11, "determinism", 0, criterion11},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : kCriteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0) o.require(secs < c.budget_s, "runtime over " + f6(c.budget_s) + " s");
    std::printf("%s criterion %d (%s) [%.1f s]: %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
