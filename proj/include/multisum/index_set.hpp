#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace multisum {

enum class IndexKind { rect, explicit_set, staircase };

// Finite nonempty subset of Z_+^d (coordinates are 1-based).
class IndexSet {
 public:
  static IndexSet rect(std::vector<int> n);
  // Cells as d-tuples; duplicates are removed and the rest sorted.
  static IndexSet explicit_set(int d, std::vector<std::vector<int>> cells);
  // d = 2 staircase {(i, j): 1 <= i <= profile.size(), 1 <= j <= profile[i-1]}.
  static IndexSet staircase(std::vector<int> profile);

  int dimension() const { return d_; }
  IndexKind kind() const { return kind_; }
  std::string kind_name() const;
  std::uint64_t cardinality() const { return card_; }
  const std::vector<int>& rect_sides() const { return sides_; }
  const std::vector<int>& profile() const { return profile_; }

  // Row-major flat list of cells (d ints each), sorted lexicographically.
  std::vector<int> flat_cells() const;
  bool contains(std::span<const int> cell) const;
  // Largest coordinate used on each axis.
  std::vector<int> max_coords() const;
  std::vector<int> min_coords() const;

  std::string digest() const;

 private:
  int d_ = 0;
  IndexKind kind_ = IndexKind::rect;
  std::uint64_t card_ = 0;
  std::vector<int> sides_;
  std::vector<int> profile_;
  std::vector<int> cells_;  // explicit / staircase cells, flat and sorted
};

IndexSet make_rect(std::vector<int> n);

// Axis-aligned box [lo, hi] (inclusive).
struct Box {
  std::vector<int> lo, hi;
  std::uint64_t cardinality() const;
  int min_side() const;
};

struct InscribedResult {
  Box box;
  double kappa_minus = 0;
  bool heuristic = false;
};

struct CircumscribedResult {
  Box box;
  double kappa_plus = 0;
};

struct RectPair {
  Box inner, outer;
  double kappa_minus = 0, kappa_plus = 0;
  bool heuristic = false;
};

// Maximal-cardinality rectangle inside L; ties go to the lexicographically
// smallest (lo, hi). Exact for d <= 2, greedy with restarts for d >= 3.
InscribedResult best_inscribed_rect(const IndexSet& L);
CircumscribedResult circumscribed_rect(const IndexSet& L);
RectPair rect_pair(const IndexSet& L);

struct ConditionEntry {
  std::uint64_t cardinality = 0;
  int inner_min_side = 0;
  int outer_min_side = 0;
  double kappa_minus = 0;
  double kappa_plus = 0;
  bool heuristic = false;
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;
  double kappa_threshold = 0.1;
  // Inscribed route: inner sides strictly increasing and kappa_minus
  // nonincreasing with final value below the threshold.
  bool inscribed_conditions_met = false;
  // Circumscribed route: same with the outer rectangle and kappa_plus.
  bool circumscribed_conditions_met = false;
  bool any_met() const { return inscribed_conditions_met || circumscribed_conditions_met; }
};

ConditionReport nclt_condition_report(const std::vector<IndexSet>& family,
                                      double kappa_threshold = 0.1);

// Families used in examples and shipped configurations.
IndexSet square_minus_corner(int n);
IndexSet square_plus_cell(int n);
// n x n square without its upper-right (n/2 x n/2) quadrant.
IndexSet lshape_fixed_fraction(int n);
IndexSet cube(int d, int n);

}  // namespace multisum
