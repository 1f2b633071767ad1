#pragma once

// Exact finite group subsets stored as disjoint integer intervals of the last
// canonical coordinate, grouped by the leading coordinates ("rows"). Boxes
// and their products compress to a handful of intervals per row, which keeps
// sets like union_{k<n} F_k^{-1} F_n computable exactly for n up to 10^3
// without expanding |A|*|B| individual products.
//
// Products work row by row: once the leading coordinates of both factors are
// fixed, the last output coordinate is an interval sum shifted by a constant
// (zero for the abelian groups, a*b' for Heisenberg), so each interval pair
// contributes exactly one output interval.

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "shiftlab/group.hpp"

namespace shiftlab {

class PackedSet {
 public:
  struct Interval {
    std::int64_t lo = 0, hi = 0;  // inclusive endpoints
  };
  using Prefix = std::array<std::int64_t, 2>;

  explicit PackedSet(const AmenableGroup& group) : group_(group) {}

  static PackedSet from_elements(const AmenableGroup& group,
                                 const std::vector<GroupElement>& elements);

  const AmenableGroup& group() const { return group_; }

  void insert(const GroupElement& g);
  // Inserts {(prefix, c) : lo <= c <= hi} where prefix holds the leading
  // coordinates (zero-padded for rank < 3).
  void insert_interval(Prefix prefix, std::int64_t lo, std::int64_t hi);

  void unite(const PackedSet& other);
  PackedSet inverse() const;
  PackedSet product(const PackedSet& rhs, std::int64_t cardinality_cap) const;
  PackedSet symmetric_difference(const PackedSet& other) const;

  bool contains(const GroupElement& g) const;
  std::int64_t cardinality() const { return cardinality_; }
  std::size_t row_count() const { return rows_.size(); }
  bool empty() const { return cardinality_ == 0; }

  // Expands to individual elements in (prefix, interval) order, which is
  // coordinate-lexicographic. Throws past the cap.
  std::vector<GroupElement> elements(std::int64_t cap = 50'000'000) const;

 private:
  GroupElement make_element(const Prefix& p, std::int64_t last) const;
  Prefix prefix_of(const GroupElement& g) const;
  std::int64_t last_of(const GroupElement& g) const;

  AmenableGroup group_;
  std::map<Prefix, std::vector<Interval>> rows_;  // per-row: sorted, disjoint, non-adjacent
  std::int64_t cardinality_ = 0;
};

}  // namespace shiftlab
