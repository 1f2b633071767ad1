#include "shiftlab/folner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "shiftlab/errors.hpp"

namespace shiftlab {
namespace {

void require_n(int n) {
  if (n < 1) throw std::domain_error("Folner index n must be >= 1");
}

std::int64_t cube(std::int64_t n) { return n * n * n; }

}  // namespace

std::int64_t FolnerSequence::cardinality(int n) const {
  require_n(n);
  std::int64_t nn = n;
  switch (group_.kind()) {
    case GroupKind::Z: return nn;
    case GroupKind::Z2: return nn * nn;
    case GroupKind::Z3: return nn * nn * nn;
    case GroupKind::Heisenberg: return nn * nn * nn * nn;
  }
  return 0;
}

PackedSet FolnerSequence::packed_set(int n) const {
  require_n(n);
  PackedSet box(group_);
  std::int64_t m = n;
  switch (group_.kind()) {
    case GroupKind::Z:
      box.insert_interval({0, 0}, 0, m - 1);
      break;
    case GroupKind::Z2:
      for (std::int64_t a = 0; a < m; ++a) box.insert_interval({a, 0}, 0, m - 1);
      break;
    case GroupKind::Z3:
      for (std::int64_t a = 0; a < m; ++a)
        for (std::int64_t b = 0; b < m; ++b) box.insert_interval({a, b}, 0, m - 1);
      break;
    case GroupKind::Heisenberg:
      for (std::int64_t a = 0; a < m; ++a)
        for (std::int64_t b = 0; b < m; ++b) box.insert_interval({a, b}, 0, m * m - 1);
      break;
  }
  if (family_ == FolnerFamily::Boxes) return box;
  PackedSet shift(group_);
  shift.insert(group_.element(cube(m)));
  return shift.product(box, INT64_MAX / 2);
}

std::vector<GroupElement> FolnerSequence::set(int n) const { return packed_set(n).elements(); }

TemperednessReport temperedness_report(const FolnerSequence& seq, int n_max,
                                       std::int64_t union_cap) {
  if (n_max < 2) throw std::domain_error("temperedness_report needs n_max >= 2");
  TemperednessReport rep;
  rep.n_lo = 2;
  rep.n_hi = n_max;
  PackedSet prefix_union = seq.packed_set(1);  // union_{k <= n-1} F_k, grown incrementally
  for (int n = 2; n <= n_max; ++n) {
    PackedSet fn = seq.packed_set(n);
    PackedSet u = prefix_union.inverse().product(fn, union_cap);
    rep.union_cards.push_back(u.cardinality());
    rep.folner_cards.push_back(fn.cardinality());
    rep.ratios.push_back(static_cast<double>(u.cardinality()) /
                         static_cast<double>(fn.cardinality()));
    prefix_union.unite(fn);
  }
  rep.witnessed_c = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  return rep;
}

GrowthReport growth_report(const FolnerSequence& seq, int n_lo, int n_hi) {
  if (n_lo < 2) throw std::domain_error("growth_report needs n_lo >= 2 (ln n must be positive)");
  if (n_hi < n_lo) throw std::domain_error("growth_report needs n_hi >= n_lo");
  GrowthReport rep;
  for (int n = n_lo; n <= n_hi; ++n) {
    std::int64_t card = seq.cardinality(n);
    rep.rows.push_back({n, card, static_cast<double>(card) / std::log(static_cast<double>(n))});
  }
  rep.strictly_increasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    if (!(rep.rows[i - 1].ratio < rep.rows[i].ratio)) {
      rep.strictly_increasing = false;
      break;
    }
  }
  return rep;
}

std::vector<GroupElement> k_boundary(const AmenableGroup& group,
                                     const std::vector<GroupElement>& a,
                                     const std::vector<GroupElement>& k) {
  if (a.empty() || k.empty()) throw std::domain_error("k_boundary: empty A or K");
  std::unordered_set<GroupElement, GroupElementHash> in_a(a.begin(), a.end());
  std::unordered_set<GroupElement, GroupElementHash> seen;
  std::vector<GroupElement> out;
  for (const auto& kk : k) {
    GroupElement kinv = group.inverse(kk);
    for (const auto& aa : a) {
      GroupElement g = group.multiply(kinv, aa);  // then kk * g = aa is in A
      if (!seen.insert(g).second) continue;
      bool hits_a = false, hits_complement = false;
      for (const auto& k2 : k) {
        if (in_a.count(group.multiply(k2, g))) {
          hits_a = true;
        } else {
          hits_complement = true;
        }
        if (hits_a && hits_complement) break;
      }
      if (hits_a && hits_complement) out.push_back(g);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double invariance_defect(const AmenableGroup& group, const std::vector<GroupElement>& a,
                         const std::vector<GroupElement>& k) {
  return static_cast<double>(k_boundary(group, a, k).size()) / static_cast<double>(a.size());
}

bool is_invariant(const AmenableGroup& group, const std::vector<GroupElement>& a,
                  const std::vector<GroupElement>& k, double delta) {
  return invariance_defect(group, a, k) < delta;
}

double folner_defect(const FolnerSequence& seq, int n, const GroupElement& g) {
  PackedSet fn = seq.packed_set(n);
  PackedSet left(seq.group());
  left.insert(g);
  PackedSet translated = left.product(fn, INT64_MAX / 2);
  PackedSet diff = fn.symmetric_difference(translated);
  return static_cast<double>(diff.cardinality()) / static_cast<double>(fn.cardinality());
}

}  // namespace shiftlab
