#pragma once

// Folner sequences and their quantitative diagnostics: the Shulman
// temperedness ratio |union_{k<n} F_k^{-1} F_n| / |F_n| with its witnessed
// constant, the growth ratio |F_n| / ln n, K-boundaries and invariance
// defects. Everything here is exact set arithmetic; nothing is sampled.

#include <cstdint>
#include <vector>

#include "shiftlab/group.hpp"
#include "shiftlab/packed_set.hpp"

namespace shiftlab {

enum class FolnerFamily {
  Boxes,        // Z: {0..n-1}; Z^d: {0..n-1}^d; Heisenberg: a,b in [0,n), c in [0,n^2)
  ShiftedBoxes  // the same boxes left-translated by (n^3, 0, 0); not tempered over Z
};

class FolnerSequence {
 public:
  explicit FolnerSequence(const AmenableGroup& group, FolnerFamily family = FolnerFamily::Boxes)
      : group_(group), family_(family) {}

  const AmenableGroup& group() const { return group_; }
  FolnerFamily family() const { return family_; }

  // |F_n| in closed form: n^d for Z^d, n^4 for Heisenberg (same for both
  // families). Strictly increasing in n.
  std::int64_t cardinality(int n) const;
  PackedSet packed_set(int n) const;
  // Elements in coordinate-lexicographic order.
  std::vector<GroupElement> set(int n) const;

 private:
  AmenableGroup group_;
  FolnerFamily family_;
};

struct TemperednessReport {
  int n_lo = 2;
  int n_hi = 2;
  std::vector<double> ratios;                // ratio(n) for n = n_lo .. n_hi
  std::vector<std::int64_t> union_cards;     // |union_{k<n} F_k^{-1} F_n|
  std::vector<std::int64_t> folner_cards;    // |F_n|
  double witnessed_c = 0.0;                  // max ratio over the range

  double ratio(int n) const { return ratios.at(static_cast<std::size_t>(n - n_lo)); }
};

// Materializes union_{k<n} F_k^{-1} F_n exactly for every n in [2, n_max],
// via (union_{k<n} F_k)^{-1} F_n (products distribute over unions). The
// union set is kept in packed interval form; union_cap bounds its size.
TemperednessReport temperedness_report(const FolnerSequence& seq, int n_max,
                                       std::int64_t union_cap = 100'000'000);

struct GrowthReport {
  struct Row {
    int n;
    std::int64_t cardinality;
    double ratio;  // |F_n| / ln n
  };
  std::vector<Row> rows;
  bool strictly_increasing = false;  // ratio strictly increasing across the whole range
};

GrowthReport growth_report(const FolnerSequence& seq, int n_lo, int n_hi);

// K-boundary of a finite set A: elements g whose translate Kg meets both A
// and its complement. Candidates live in K^{-1} A. Output is sorted.
std::vector<GroupElement> k_boundary(const AmenableGroup& group,
                                     const std::vector<GroupElement>& a,
                                     const std::vector<GroupElement>& k);

// |B(A, K)| / |A|.
double invariance_defect(const AmenableGroup& group, const std::vector<GroupElement>& a,
                         const std::vector<GroupElement>& k);

// True when the invariance defect is below delta ((K, delta)-invariance).
bool is_invariant(const AmenableGroup& group, const std::vector<GroupElement>& a,
                  const std::vector<GroupElement>& k, double delta);

// |F_n \symdiff g F_n| / |F_n|, the per-generator asymptotic invariance witness.
double folner_defect(const FolnerSequence& seq, int n, const GroupElement& g);

}  // namespace shiftlab
