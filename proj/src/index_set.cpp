#include "multisum/index_set.hpp"

#include <algorithm>
#include <climits>
#include <cstdint>
#include <cmath>
#include <numeric>

#include "multisum/digest.hpp"
#include "multisum/errors.hpp"

namespace multisum {

namespace {

bool less_cell(const int* a, const int* b, int d) {
  return std::lexicographical_compare(a, a + d, b, b + d);
}

}  // namespace

IndexSet IndexSet::rect(std::vector<int> n) {
  if (n.empty()) throw ArgumentError("make_rect: need at least one axis");
  IndexSet L;
  L.d_ = static_cast<int>(n.size());
  L.kind_ = IndexKind::rect;
  L.card_ = 1;
  for (int v : n) {
    if (v < 1) throw ArgumentError("make_rect: side lengths must be >= 1");
    L.card_ *= static_cast<std::uint64_t>(v);
  }
  L.sides_ = std::move(n);
  return L;
}

IndexSet make_rect(std::vector<int> n) { return IndexSet::rect(std::move(n)); }

IndexSet IndexSet::explicit_set(int d, std::vector<std::vector<int>> cells) {
  if (d < 1) throw ArgumentError("explicit index set: d must be >= 1");
  if (cells.empty()) throw ArgumentError("explicit index set: L must be nonempty");
  for (const auto& c : cells) {
    if (static_cast<int>(c.size()) != d)
      throw ArgumentError("explicit index set: every cell needs d coordinates");
    for (int v : c)
      if (v < 1) throw ArgumentError("explicit index set: coordinates are 1-based");
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  IndexSet L;
  L.d_ = d;
  L.kind_ = IndexKind::explicit_set;
  L.card_ = cells.size();
  L.cells_.reserve(cells.size() * d);
  for (const auto& c : cells) L.cells_.insert(L.cells_.end(), c.begin(), c.end());
  return L;
}

IndexSet IndexSet::staircase(std::vector<int> profile) {
  if (profile.empty()) throw ArgumentError("staircase: empty profile");
  IndexSet L;
  L.d_ = 2;
  L.kind_ = IndexKind::staircase;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] < 1) throw ArgumentError("staircase: profile entries must be >= 1");
    for (int j = 1; j <= profile[i]; ++j) {
      L.cells_.push_back(static_cast<int>(i) + 1);
      L.cells_.push_back(j);
    }
  }
  L.card_ = L.cells_.size() / 2;
  L.profile_ = std::move(profile);
  return L;
}

std::string IndexSet::kind_name() const {
  switch (kind_) {
    case IndexKind::rect: return "rect";
    case IndexKind::explicit_set: return "explicit";
    case IndexKind::staircase: return "staircase";
  }
  return "unknown";
}

std::vector<int> IndexSet::flat_cells() const {
  if (kind_ != IndexKind::rect) return cells_;
  std::vector<int> out;
  out.reserve(card_ * d_);
  std::vector<int> c(d_, 1);
  while (true) {
    out.insert(out.end(), c.begin(), c.end());
    int s = d_ - 1;
    while (s >= 0 && ++c[s] > sides_[s]) c[s--] = 1;
    if (s < 0) break;
  }
  return out;
}

bool IndexSet::contains(std::span<const int> cell) const {
  if (static_cast<int>(cell.size()) != d_) return false;
  if (kind_ == IndexKind::rect) {
    for (int s = 0; s < d_; ++s)
      if (cell[s] < 1 || cell[s] > sides_[s]) return false;
    return true;
  }
  std::size_t lo = 0, hi = card_;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (less_cell(&cells_[mid * d_], cell.data(), d_))
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo < card_ && std::equal(cell.begin(), cell.end(), cells_.begin() + lo * d_);
}

std::vector<int> IndexSet::max_coords() const {
  if (kind_ == IndexKind::rect) return sides_;
  std::vector<int> m(d_, 0);
  for (std::size_t i = 0; i < card_; ++i)
    for (int s = 0; s < d_; ++s) m[s] = std::max(m[s], cells_[i * d_ + s]);
  return m;
}

std::vector<int> IndexSet::min_coords() const {
  if (kind_ == IndexKind::rect) return std::vector<int>(d_, 1);
  std::vector<int> m(d_, INT32_MAX);
  for (std::size_t i = 0; i < card_; ++i)
    for (int s = 0; s < d_; ++s) m[s] = std::min(m[s], cells_[i * d_ + s]);
  return m;
}

std::string IndexSet::digest() const {
  Digest h;
  h.add("index_set").add(d_).add(kind_name());
  for (int v : sides_) h.add(v);
  for (int v : cells_) h.add(v);
  return h.hex();
}

std::uint64_t Box::cardinality() const {
  std::uint64_t c = 1;
  for (std::size_t s = 0; s < lo.size(); ++s) c *= static_cast<std::uint64_t>(hi[s] - lo[s] + 1);
  return c;
}

int Box::min_side() const {
  int m = INT32_MAX;
  for (std::size_t s = 0; s < lo.size(); ++s) m = std::min(m, hi[s] - lo[s] + 1);
  return m;
}

namespace {

double kappa(std::uint64_t gap, std::uint64_t card) {
  return static_cast<double>(gap) / std::sqrt(static_cast<double>(card));
}

bool box_less(const Box& a, const Box& b) {
  if (a.lo != b.lo) return a.lo < b.lo;
  return a.hi < b.hi;
}

Box inscribed_2d(const IndexSet& L) {
  auto lo = L.min_coords(), hi = L.max_coords();
  const int w = hi[0] - lo[0] + 1, h = hi[1] - lo[1] + 1;
  std::vector<char> occ(static_cast<std::size_t>(w) * h, 0);
  auto cells = L.flat_cells();
  for (std::size_t i = 0; i < L.cardinality(); ++i)
    occ[static_cast<std::size_t>(cells[2 * i] - lo[0]) * h + (cells[2 * i + 1] - lo[1])] = 1;
  Box best;
  std::uint64_t best_card = 0;
  std::vector<char> valid(h);
  for (int a = 0; a < w; ++a) {
    std::fill(valid.begin(), valid.end(), 1);
    for (int b = a; b < w; ++b) {
      bool any = false;
      for (int j = 0; j < h; ++j) {
        valid[j] = valid[j] && occ[static_cast<std::size_t>(b) * h + j];
        any = any || valid[j];
      }
      if (!any) break;
      for (int j = 0; j < h;) {
        if (!valid[j]) {
          ++j;
          continue;
        }
        int e = j;
        while (e + 1 < h && valid[e + 1]) ++e;
        Box cand{{a + lo[0], j + lo[1]}, {b + lo[0], e + lo[1]}};
        std::uint64_t c = cand.cardinality();
        if (c > best_card || (c == best_card && box_less(cand, best))) {
          best = cand;
          best_card = c;
        }
        j = e + 1;
      }
    }
  }
  return best;
}

bool slab_inside(const IndexSet& L, const Box& b, int axis, int coord) {
  const int d = static_cast<int>(b.lo.size());
  std::vector<int> c(b.lo);
  c[axis] = coord;
  while (true) {
    if (!L.contains(c)) return false;
    int s = d - 1;
    while (s >= 0) {
      if (s == axis) {
        --s;
        continue;
      }
      if (++c[s] <= b.hi[s]) break;
      c[s] = b.lo[s];
      --s;
    }
    if (s < 0) return true;
  }
}

Box inscribed_greedy(const IndexSet& L) {
  const int d = L.dimension();
  auto cells = L.flat_cells();
  const std::size_t n = L.cardinality();
  const std::size_t restarts = std::min<std::size_t>(n, 64);
  Box best;
  std::uint64_t best_card = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::size_t idx = restarts == n ? r : r * n / restarts;
    Box b{std::vector<int>(cells.begin() + idx * d, cells.begin() + (idx + 1) * d),
          std::vector<int>(cells.begin() + idx * d, cells.begin() + (idx + 1) * d)};
    while (true) {
      int best_axis = -1, best_dir = 0;
      std::uint64_t gain = 0;
      for (int s = 0; s < d; ++s)
        for (int dir : {-1, 1}) {
          int coord = dir < 0 ? b.lo[s] - 1 : b.hi[s] + 1;
          if (coord < 1 || !slab_inside(L, b, s, coord)) continue;
          std::uint64_t g = b.cardinality() / (b.hi[s] - b.lo[s] + 1);
          if (g > gain) {
            gain = g;
            best_axis = s;
            best_dir = dir;
          }
        }
      if (best_axis < 0) break;
      if (best_dir < 0)
        --b.lo[best_axis];
      else
        ++b.hi[best_axis];
    }
    std::uint64_t c = b.cardinality();
    if (c > best_card || (c == best_card && box_less(b, best))) {
      best = b;
      best_card = c;
    }
  }
  return best;
}

}  // namespace

InscribedResult best_inscribed_rect(const IndexSet& L) {
  InscribedResult res;
  if (L.kind() == IndexKind::rect) {
    res.box = {std::vector<int>(L.dimension(), 1), L.rect_sides()};
  } else if (L.dimension() == 1) {
    auto cells = L.flat_cells();
    Box best;
    std::uint64_t best_card = 0;
    for (std::size_t i = 0; i < cells.size();) {
      std::size_t e = i;
      while (e + 1 < cells.size() && cells[e + 1] == cells[e] + 1) ++e;
      Box cand{{cells[i]}, {cells[e]}};
      if (cand.cardinality() > best_card) {
        best = cand;
        best_card = cand.cardinality();
      }
      i = e + 1;
    }
    res.box = best;
  } else if (L.dimension() == 2) {
    res.box = inscribed_2d(L);
  } else {
    res.box = inscribed_greedy(L);
    res.heuristic = true;
  }
  res.kappa_minus = kappa(L.cardinality() - res.box.cardinality(), L.cardinality());
  return res;
}

CircumscribedResult circumscribed_rect(const IndexSet& L) {
  CircumscribedResult res;
  res.box = {L.min_coords(), L.max_coords()};
  res.kappa_plus = kappa(res.box.cardinality() - L.cardinality(), L.cardinality());
  return res;
}

RectPair rect_pair(const IndexSet& L) {
  auto in = best_inscribed_rect(L);
  auto out = circumscribed_rect(L);
  return {in.box, out.box, in.kappa_minus, out.kappa_plus, in.heuristic};
}

ConditionReport nclt_condition_report(const std::vector<IndexSet>& family,
                                      double kappa_threshold) {
  if (family.empty()) throw ArgumentError("nclt_condition_report: empty family");
  ConditionReport rep;
  rep.kappa_threshold = kappa_threshold;
  for (const auto& L : family) {
    auto rp = rect_pair(L);
    rep.entries.push_back({L.cardinality(), rp.inner.min_side(), rp.outer.min_side(),
                           rp.kappa_minus, rp.kappa_plus, rp.heuristic});
  }
  auto route_ok = [&](auto side, auto kap) {
    const auto& e = rep.entries;
    for (std::size_t i = 1; i < e.size(); ++i) {
      if (!(side(e[i]) > side(e[i - 1]))) return false;
      if (kap(e[i]) > kap(e[i - 1]) + 1e-12) return false;
    }
    return kap(e.back()) < kappa_threshold;
  };
  rep.inscribed_conditions_met = route_ok([](const ConditionEntry& e) { return e.inner_min_side; },
                                          [](const ConditionEntry& e) { return e.kappa_minus; });
  rep.circumscribed_conditions_met =
      route_ok([](const ConditionEntry& e) { return e.outer_min_side; },
               [](const ConditionEntry& e) { return e.kappa_plus; });
  return rep;
}

IndexSet square_minus_corner(int n) {
  if (n < 2) throw ArgumentError("square_minus_corner: n must be >= 2");
  std::vector<std::vector<int>> cells;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != n || j != n) cells.push_back({i, j});
  return IndexSet::explicit_set(2, std::move(cells));
}

IndexSet square_plus_cell(int n) {
  if (n < 1) throw ArgumentError("square_plus_cell: n must be >= 1");
  std::vector<std::vector<int>> cells;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) cells.push_back({i, j});
  cells.push_back({n + 1, 1});
  return IndexSet::explicit_set(2, std::move(cells));
}

IndexSet lshape_fixed_fraction(int n) {
  if (n < 2 || n % 2) throw ArgumentError("lshape_fixed_fraction: n must be even and >= 2");
  std::vector<std::vector<int>> cells;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i <= n / 2 || j <= n / 2) cells.push_back({i, j});
  return IndexSet::explicit_set(2, std::move(cells));
}

IndexSet cube(int d, int n) { return IndexSet::rect(std::vector<int>(d, n)); }

}  // namespace multisum
