#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "multisum/errors.hpp"
#include "multisum/index_set.hpp"
#include "oracles.hpp"

using namespace multisum;
using doctest::Approx;

namespace {

IndexSet from_cells(const std::set<oracle::Cell>& cells) {
  std::vector<std::vector<int>> v;
  for (auto& [a, b] : cells) v.push_back({a, b});
  return IndexSet::explicit_set(2, v);
}

}  // namespace

TEST_SUITE("index_sets") {
  TEST_CASE("rectangles") {
    CHECK(make_rect({1, 1}).cardinality() == 1);
    CHECK(make_rect({3, 4}).cardinality() == 12);
    auto r3 = make_rect({2, 3, 4});
    CHECK(r3.cardinality() == 24);
    CHECK(r3.dimension() == 3);
    CHECK_THROWS_AS(make_rect({}), ArgumentError);
    CHECK_THROWS_AS(make_rect({3, 0}), ArgumentError);
  }

  TEST_CASE("explicit sets are deduplicated and sorted") {
    auto L = IndexSet::explicit_set(2, {{2, 1}, {1, 1}, {2, 1}});
    CHECK(L.cardinality() == 2);
    CHECK(L.flat_cells() == std::vector<int>{1, 1, 2, 1});
    std::vector<int> c{2, 1};
    CHECK(L.contains(c));
    CHECK_THROWS_AS(IndexSet::explicit_set(2, {}), ArgumentError);
    CHECK_THROWS_AS(IndexSet::explicit_set(2, {{0, 1}}), ArgumentError);
  }

  TEST_CASE("staircase geometry") {
    auto L = IndexSet::staircase({4, 4, 3, 2});
    CHECK(L.cardinality() == 13);
    auto in = best_inscribed_rect(L);
    // [1,3] x [1,3] has 9 cells and fits (rows 1-3 have length >= 3)
    CHECK(in.box.cardinality() == 9);
    CHECK(in.kappa_minus == Approx(4 / std::sqrt(13.0)).epsilon(1e-14));
    auto out = circumscribed_rect(L);
    CHECK(out.box.cardinality() == 16);
    CHECK(out.kappa_plus == Approx(3 / std::sqrt(13.0)).epsilon(1e-14));
  }

  TEST_CASE("two disjoint rectangles") {
    std::set<oracle::Cell> cells;
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) cells.insert({i, j});
    for (int i = 6; i <= 7; ++i)
      for (int j = 6; j <= 7; ++j) cells.insert({i, j});
    auto in = best_inscribed_rect(from_cells(cells));
    CHECK(in.box.cardinality() == 9);
    CHECK(in.box.lo == std::vector<int>{1, 1});
    CHECK(in.kappa_minus == Approx(4 / std::sqrt(13.0)).epsilon(1e-14));
  }

  TEST_CASE("diagonal sets: kappa_plus grows") {
    double prev = -1;
    for (int n : {2, 4, 8, 16}) {
      std::vector<std::vector<int>> c;
      for (int i = 1; i <= n; ++i) c.push_back({i, i});
      auto k = circumscribed_rect(IndexSet::explicit_set(2, c)).kappa_plus;
      CHECK(k == Approx((double(n) * n - n) / std::sqrt(double(n))).epsilon(1e-14));
      CHECK(k > prev);
      prev = k;
    }
  }

  TEST_CASE("rect: both deficiencies vanish") {
    auto r = rect_pair(make_rect({5, 7}));
    CHECK(r.kappa_minus == 0.0);
    CHECK(r.kappa_plus == 0.0);
    CHECK(r.inner.cardinality() == 35);
  }

  TEST_CASE("inscribed rectangle is optimal on random sets (exhaustive oracle)") {
    std::mt19937_64 gen(2024);
    for (int rep = 0; rep < 60; ++rep) {
      int w = 3 + gen() % 18, h = 3 + gen() % 18;  // |L+| <= 400
      double density = 0.5 + 0.45 * (gen() % 100) / 100.0;
      std::set<oracle::Cell> cells;
      for (int i = 1; i <= w; ++i)
        for (int j = 1; j <= h; ++j)
          if ((gen() % 1000) / 1000.0 < density) cells.insert({i, j});
      if (cells.empty()) cells.insert({1, 1});
      auto L = from_cells(cells);
      auto mine = best_inscribed_rect(L);
      auto ref = oracle::brute_inscribed(cells);
      CHECK(mine.box.cardinality() == ref.card);
      CHECK(mine.box.lo == std::vector<int>{ref.lo0, ref.lo1});
      CHECK(mine.box.hi == std::vector<int>{ref.hi0, ref.hi1});
      CHECK_FALSE(mine.heuristic);

      auto pr = rect_pair(L);
      double root = std::sqrt(double(L.cardinality()));
      CHECK(pr.kappa_minus * root == Approx(double(L.cardinality() - pr.inner.cardinality())));
      CHECK(pr.kappa_plus * root == Approx(double(pr.outer.cardinality() - L.cardinality())));
      CHECK(pr.inner.cardinality() <= L.cardinality());
      CHECK(L.cardinality() <= pr.outer.cardinality());
      bool is_rect = pr.outer.cardinality() == L.cardinality();
      CHECK((pr.kappa_minus == 0 && pr.kappa_plus == 0) == is_rect);
    }
  }

  TEST_CASE("condition report on shipped families") {
    std::vector<IndexSet> squares, minus, plus, lshape;
    for (int n : {4, 8, 16, 32, 64}) {
      squares.push_back(make_rect({n, n}));
      minus.push_back(square_minus_corner(n));
      plus.push_back(square_plus_cell(n));
      lshape.push_back(lshape_fixed_fraction(n));
    }
    CHECK(nclt_condition_report(squares).inscribed_conditions_met);
    auto pl = nclt_condition_report(plus);
    CHECK(pl.inscribed_conditions_met);
    for (std::size_t i = 0; i < plus.size(); ++i) {
      double n = 4 << i;
      CHECK(pl.entries[i].kappa_minus == Approx(1 / std::sqrt(n * n + 1)).epsilon(1e-12));
    }
    auto mi = nclt_condition_report(minus);
    CHECK(mi.circumscribed_conditions_met);
    for (std::size_t i = 0; i < minus.size(); ++i) {
      double n = 4 << i;
      CHECK(mi.entries[i].kappa_plus == Approx(1 / std::sqrt(n * n - 1)).epsilon(1e-12));
    }
    auto ls = nclt_condition_report(lshape);
    CHECK_FALSE(ls.any_met());
    for (std::size_t i = 0; i < lshape.size(); ++i) {
      double n = 4 << i;
      CHECK(ls.entries[i].kappa_minus == Approx(n / (2 * std::sqrt(3.0))).epsilon(1e-12));
      CHECK(ls.entries[i].kappa_minus >= 0.3);
    }
  }

  TEST_CASE("d = 3 inscribed search is flagged heuristic on irregular sets") {
    std::vector<std::vector<int>> cells;
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j)
        for (int k = 1; k <= 3; ++k)
          if (!(i == 3 && j == 3 && k == 3)) cells.push_back({i, j, k});
    auto r = best_inscribed_rect(IndexSet::explicit_set(3, cells));
    CHECK(r.heuristic);
    CHECK(r.box.cardinality() == 18);
    CHECK_FALSE(best_inscribed_rect(cube(3, 4)).heuristic);
  }

  TEST_CASE("digests distinguish sets") {
    CHECK(make_rect({3, 4}).digest() != make_rect({4, 3}).digest());
    CHECK(make_rect({3, 4}).digest() == make_rect({3, 4}).digest());
  }
}
