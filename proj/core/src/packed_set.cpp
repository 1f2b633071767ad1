#include "shiftlab/packed_set.hpp"

#include <algorithm>
#include <stdexcept>

#include "shiftlab/errors.hpp"

namespace shiftlab {
namespace {

// Inserts iv into a sorted disjoint list, merging overlapping or adjacent
// intervals. Returns the change in total cardinality.
std::int64_t insert_merge(std::vector<PackedSet::Interval>& list, PackedSet::Interval iv) {
  auto first = std::lower_bound(
      list.begin(), list.end(), iv.lo - 1,
      [](const PackedSet::Interval& a, std::int64_t v) { return a.hi < v; });
  auto last = std::upper_bound(
      first, list.end(), iv.hi + 1,
      [](std::int64_t v, const PackedSet::Interval& b) { return v < b.lo; });
  if (first == last) {
    list.insert(first, iv);
    return iv.hi - iv.lo + 1;
  }
  std::int64_t removed = 0;
  for (auto it = first; it != last; ++it) removed += it->hi - it->lo + 1;
  iv.lo = std::min(iv.lo, first->lo);
  iv.hi = std::max(iv.hi, std::prev(last)->hi);
  *first = iv;
  list.erase(first + 1, last);
  return (iv.hi - iv.lo + 1) - removed;
}

}  // namespace

PackedSet::Prefix PackedSet::prefix_of(const GroupElement& g) const {
  switch (group_.dim()) {
    case 1: return {0, 0};
    case 2: return {g.v[0], 0};
    default: return {g.v[0], g.v[1]};
  }
}

std::int64_t PackedSet::last_of(const GroupElement& g) const { return g.v[group_.dim() - 1]; }

GroupElement PackedSet::make_element(const Prefix& p, std::int64_t last) const {
  switch (group_.dim()) {
    case 1: return GroupElement{{last, 0, 0}, group_.kind()};
    case 2: return GroupElement{{p[0], last, 0}, group_.kind()};
    default: return GroupElement{{p[0], p[1], last}, group_.kind()};
  }
}

PackedSet PackedSet::from_elements(const AmenableGroup& group,
                                   const std::vector<GroupElement>& elements) {
  PackedSet s(group);
  for (const auto& g : elements) s.insert(g);
  return s;
}

void PackedSet::insert(const GroupElement& g) {
  if (g.kind != group_.kind()) throw std::invalid_argument("insert: element of a different group");
  std::int64_t c = last_of(g);
  insert_interval(prefix_of(g), c, c);
}

void PackedSet::insert_interval(Prefix prefix, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("insert_interval: empty interval");
  cardinality_ += insert_merge(rows_[prefix], Interval{lo, hi});
}

void PackedSet::unite(const PackedSet& other) {
  if (!(group_ == other.group_)) throw std::invalid_argument("unite: group mismatch");
  for (const auto& [prefix, intervals] : other.rows_) {
    auto& row = rows_[prefix];
    for (const auto& iv : intervals) cardinality_ += insert_merge(row, iv);
  }
}

PackedSet PackedSet::inverse() const {
  PackedSet out(group_);
  const bool heis = group_.kind() == GroupKind::Heisenberg;
  for (const auto& [prefix, intervals] : rows_) {
    Prefix p{-prefix[0], -prefix[1]};
    for (const auto& iv : intervals) {
      if (heis) {
        // (a,b,c)^{-1} = (-a,-b, ab - c)
        std::int64_t ab = prefix[0] * prefix[1];
        out.insert_interval(p, ab - iv.hi, ab - iv.lo);
      } else {
        out.insert_interval(p, -iv.hi, -iv.lo);
      }
    }
  }
  return out;
}

PackedSet PackedSet::product(const PackedSet& rhs, std::int64_t cardinality_cap) const {
  if (!(group_ == rhs.group_)) throw std::invalid_argument("product: group mismatch");
  PackedSet out(group_);
  if (rows_.empty() || rhs.rows_.empty()) return out;
  const bool heis = group_.kind() == GroupKind::Heisenberg;

  // Output prefixes add componentwise, so when their range is small we can
  // bucket rows in a dense grid instead of paying a map lookup per row pair.
  auto bounds = [](const std::map<Prefix, std::vector<Interval>>& rows) {
    Prefix lo = rows.begin()->first, hi = lo;
    for (const auto& [p, ivs] : rows) {
      lo[0] = std::min(lo[0], p[0]);
      hi[0] = std::max(hi[0], p[0]);
      lo[1] = std::min(lo[1], p[1]);
      hi[1] = std::max(hi[1], p[1]);
    }
    return std::pair<Prefix, Prefix>(lo, hi);
  };
  auto [alo, ahi] = bounds(rows_);
  auto [blo, bhi] = bounds(rhs.rows_);
  const std::int64_t w0 = (ahi[0] + bhi[0]) - (alo[0] + blo[0]) + 1;
  const std::int64_t w1 = (ahi[1] + bhi[1]) - (alo[1] + blo[1]) + 1;
  constexpr std::int64_t kGridCap = 1 << 21;

  if (w0 <= kGridCap / std::max<std::int64_t>(w1, 1) && w0 * w1 <= kGridCap) {
    const std::int64_t base0 = alo[0] + blo[0], base1 = alo[1] + blo[1];
    std::vector<std::vector<Interval>> grid(static_cast<std::size_t>(w0 * w1));
    for (const auto& [pa, ivs_a] : rows_) {
      for (const auto& [pb, ivs_b] : rhs.rows_) {
        auto& row = grid[static_cast<std::size_t>((pa[0] + pb[0] - base0) * w1 +
                                                  (pa[1] + pb[1] - base1))];
        std::int64_t off = heis ? pa[0] * pb[1] : 0;  // c + c' + a*b'
        for (const auto& ia : ivs_a) {
          for (const auto& ib : ivs_b) {
            out.cardinality_ +=
                insert_merge(row, Interval{ia.lo + ib.lo + off, ia.hi + ib.hi + off});
          }
        }
        if (out.cardinality_ > cardinality_cap) {
          throw ResourceLimitError("product set exceeds cardinality cap");
        }
      }
    }
    auto hint = out.rows_.end();
    for (std::int64_t i0 = 0; i0 < w0; ++i0) {
      for (std::int64_t i1 = 0; i1 < w1; ++i1) {
        auto& row = grid[static_cast<std::size_t>(i0 * w1 + i1)];
        if (row.empty()) continue;
        hint = out.rows_.emplace_hint(hint, Prefix{base0 + i0, base1 + i1}, std::move(row));
        ++hint;
      }
    }
    return out;
  }

  for (const auto& [pa, ivs_a] : rows_) {
    // For fixed left prefix the output prefixes ascend with the right ones,
    // so a hinted map insert keeps each pass near O(1) per row.
    auto hint = out.rows_.begin();
    for (const auto& [pb, ivs_b] : rhs.rows_) {
      Prefix pc{pa[0] + pb[0], pa[1] + pb[1]};
      std::int64_t off = heis ? pa[0] * pb[1] : 0;  // c + c' + a*b'
      hint = out.rows_.emplace_hint(hint, pc, std::vector<Interval>{});
      auto& row = hint->second;
      for (const auto& ia : ivs_a) {
        for (const auto& ib : ivs_b) {
          out.cardinality_ +=
              insert_merge(row, Interval{ia.lo + ib.lo + off, ia.hi + ib.hi + off});
        }
      }
      if (out.cardinality_ > cardinality_cap) {
        throw ResourceLimitError("product set exceeds cardinality cap");
      }
    }
  }
  return out;
}

PackedSet PackedSet::symmetric_difference(const PackedSet& other) const {
  if (!(group_ == other.group_)) throw std::invalid_argument("symmetric_difference: group mismatch");
  PackedSet out(group_);
  auto ita = rows_.begin();
  auto itb = other.rows_.begin();
  auto xor_rows = [&out](const Prefix& p, const std::vector<Interval>& a,
                         const std::vector<Interval>& b) {
    // Sweep over endpoints; emit stretches covered by exactly one input.
    std::size_t i = 0, j = 0;
    bool ina = false, inb = false;
    std::int64_t open = 0;
    bool has_open = false;
    auto emit = [&](std::int64_t upto) {  // [open, upto) is XOR-covered
      if (has_open && open < upto) out.insert_interval(p, open, upto - 1);
      has_open = false;
    };
    while (i < 2 * a.size() || j < 2 * b.size()) {
      std::int64_t xa = i < 2 * a.size()
                            ? (i % 2 == 0 ? a[i / 2].lo : a[i / 2].hi + 1)
                            : INT64_MAX;
      std::int64_t xb = j < 2 * b.size()
                            ? (j % 2 == 0 ? b[j / 2].lo : b[j / 2].hi + 1)
                            : INT64_MAX;
      std::int64_t x = std::min(xa, xb);
      bool was = ina != inb;
      if (xa == x) { ina = !ina; ++i; }
      if (xb == x) { inb = !inb; ++j; }
      bool now = ina != inb;
      if (was && !now) emit(x);
      if (!was && now) { open = x; has_open = true; }
    }
  };
  static const std::vector<Interval> kEmpty;
  while (ita != rows_.end() || itb != other.rows_.end()) {
    if (itb == other.rows_.end() || (ita != rows_.end() && ita->first < itb->first)) {
      xor_rows(ita->first, ita->second, kEmpty);
      ++ita;
    } else if (ita == rows_.end() || itb->first < ita->first) {
      xor_rows(itb->first, kEmpty, itb->second);
      ++itb;
    } else {
      xor_rows(ita->first, ita->second, itb->second);
      ++ita;
      ++itb;
    }
  }
  return out;
}

bool PackedSet::contains(const GroupElement& g) const {
  if (g.kind != group_.kind()) return false;
  auto it = rows_.find(prefix_of(g));
  if (it == rows_.end()) return false;
  std::int64_t c = last_of(g);
  const auto& row = it->second;
  auto pos = std::lower_bound(row.begin(), row.end(), c,
                              [](const Interval& a, std::int64_t v) { return a.hi < v; });
  return pos != row.end() && pos->lo <= c;
}

std::vector<GroupElement> PackedSet::elements(std::int64_t cap) const {
  if (cardinality_ > cap) throw ResourceLimitError("element expansion exceeds cap");
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(cardinality_));
  for (const auto& [prefix, intervals] : rows_) {
    for (const auto& iv : intervals) {
      for (std::int64_t c = iv.lo; c <= iv.hi; ++c) out.push_back(make_element(prefix, c));
    }
  }
  return out;
}

}  // namespace shiftlab
