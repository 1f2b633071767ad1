#include "shiftlab/group.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <stdexcept>

#include "shiftlab/errors.hpp"

namespace shiftlab {
namespace {

std::int64_t checked_pow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > (std::int64_t{1} << 62) / base) {
      throw ResourceLimitError("enumeration index does not fit in 64 bits");
    }
    r *= base;
  }
  return r;
}

// Number of d-tuples with max-coordinate-norm <= s (0 for s < 0).
std::int64_t ball_count(std::int64_t s, int d) {
  if (s < 0) return 0;
  return checked_pow(2 * s + 1, d);
}

std::int64_t max_norm(const GroupElement& g, int d) {
  std::int64_t m = 0;
  for (int i = 0; i < d; ++i) m = std::max(m, std::abs(g.v[i]));
  return m;
}

// #{t lexicographically below g with max norm <= s}.
std::int64_t count_lex_below(const GroupElement& g, std::int64_t s, int d) {
  ball_count(s, d);  // overflow guard for the partial products below
  std::int64_t acc = 0;
  for (int i = 0; i < d; ++i) {
    // values v in [-s, s] with v < g.v[i]
    std::int64_t below = std::clamp<std::int64_t>(g.v[i] + s, 0, 2 * s + 1);
    acc += below * ball_count(s, d - 1 - i);
    if (std::abs(g.v[i]) > s) return acc;  // prefix can no longer match
  }
  return acc;
}

}  // namespace

int AmenableGroup::dim() const {
  switch (kind_) {
    case GroupKind::Z: return 1;
    case GroupKind::Z2: return 2;
    case GroupKind::Z3: return 3;
    case GroupKind::Heisenberg: return 3;
  }
  return 0;
}

std::string AmenableGroup::name() const {
  switch (kind_) {
    case GroupKind::Z: return "Z";
    case GroupKind::Z2: return "Z2";
    case GroupKind::Z3: return "Z3";
    case GroupKind::Heisenberg: return "Heisenberg";
  }
  return "?";
}

GroupElement AmenableGroup::identity() const { return GroupElement{{0, 0, 0}, kind_}; }

GroupElement AmenableGroup::element(std::int64_t a, std::int64_t b, std::int64_t c) const {
  GroupElement g{{a, b, c}, kind_};
  for (int i = dim(); i < 3; ++i) {
    if (g.v[i] != 0) throw std::invalid_argument("coordinate beyond group rank must be zero");
  }
  return g;
}

void AmenableGroup::require_own(const GroupElement& g, const char* op) const {
  if (g.kind != kind_) {
    throw std::invalid_argument(std::string(op) + ": element belongs to a different group");
  }
}

GroupElement AmenableGroup::multiply(const GroupElement& g, const GroupElement& h) const {
  require_own(g, "multiply");
  require_own(h, "multiply");
  GroupElement r{{g.v[0] + h.v[0], g.v[1] + h.v[1], g.v[2] + h.v[2]}, kind_};
  if (kind_ == GroupKind::Heisenberg) r.v[2] += g.v[0] * h.v[1];
  return r;
}

GroupElement AmenableGroup::inverse(const GroupElement& g) const {
  require_own(g, "inverse");
  if (kind_ == GroupKind::Heisenberg) {
    return GroupElement{{-g.v[0], -g.v[1], g.v[0] * g.v[1] - g.v[2]}, kind_};
  }
  return GroupElement{{-g.v[0], -g.v[1], -g.v[2]}, kind_};
}

std::vector<GroupElement> AmenableGroup::generators() const {
  switch (kind_) {
    case GroupKind::Z: return {element(1)};
    case GroupKind::Z2: return {element(1, 0), element(0, 1)};
    case GroupKind::Z3: return {element(1, 0, 0), element(0, 1, 0), element(0, 0, 1)};
    case GroupKind::Heisenberg: return {element(1, 0, 0), element(0, 1, 0)};
  }
  return {};
}

GroupElement AmenableGroup::element_at(std::int64_t index) const {
  if (index < 1) throw std::invalid_argument("enumeration index is 1-based");
  if (kind_ == GroupKind::Z) {
    if (index == 1) return identity();
    std::int64_t m = index / 2;
    return element(index % 2 == 0 ? m : -m);
  }
  const int d = dim();
  std::int64_t r = 0;
  while (ball_count(r, d) < index) ++r;
  std::int64_t rank = index - 1 - ball_count(r - 1, d);  // 0-based within shell r
  GroupElement g = identity();
  bool hit = false;  // has some chosen coordinate reached |.| == r
  for (int i = 0; i < d; ++i) {
    for (std::int64_t val = -r;; ++val) {
      bool hit2 = hit || std::abs(val) == r;
      int rem = d - 1 - i;
      std::int64_t completions =
          hit2 ? ball_count(r, rem) : ball_count(r, rem) - ball_count(r - 1, rem);
      if (rank < completions) {
        g.v[i] = val;
        hit = hit2;
        break;
      }
      rank -= completions;
      if (val == r) throw std::logic_error("unrank overflow");
    }
  }
  return g;
}

std::int64_t AmenableGroup::index_of(const GroupElement& g) const {
  require_own(g, "index_of");
  if (kind_ == GroupKind::Z) {
    if (g.v[0] == 0) return 1;
    return g.v[0] > 0 ? 2 * g.v[0] : -2 * g.v[0] + 1;
  }
  const int d = dim();
  std::int64_t r = max_norm(g, d);
  std::int64_t rank = count_lex_below(g, r, d) - count_lex_below(g, r - 1, d);
  return ball_count(r - 1, d) + rank + 1;
}

std::vector<GroupElement> AmenableGroup::enumerate(std::int64_t count) const {
  if (count < 0) throw std::invalid_argument("enumerate: negative count");
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(count));
  if (kind_ == GroupKind::Z) {
    for (std::int64_t i = 1; i <= count; ++i) out.push_back(element_at(i));
    return out;
  }
  const int d = dim();
  // Walk shells of constant max norm, emitting each in lexicographic order.
  for (std::int64_t r = 0; static_cast<std::int64_t>(out.size()) < count; ++r) {
    GroupElement g = identity();
    auto rec = [&](auto&& self, int i, bool hit) -> void {
      if (static_cast<std::int64_t>(out.size()) == count) return;
      if (i == d) {
        if (hit) out.push_back(g);
        return;
      }
      bool last = (i == d - 1);
      for (std::int64_t val = -r; val <= r; ++val) {
        if (last && !hit && std::abs(val) != r) continue;
        g.v[i] = val;
        self(self, i + 1, hit || std::abs(val) == r);
      }
      g.v[i] = 0;
    };
    if (r == 0) {
      out.push_back(identity());
    } else {
      rec(rec, 0, false);
    }
  }
  return out;
}

AmenableGroup group_from_name(std::string_view name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "z") return AmenableGroup(GroupKind::Z);
  if (s == "z2" || s == "z^2") return AmenableGroup(GroupKind::Z2);
  if (s == "z3" || s == "z^3") return AmenableGroup(GroupKind::Z3);
  if (s == "heisenberg" || s == "h3") return AmenableGroup(GroupKind::Heisenberg);
  throw std::invalid_argument("unknown group: " + std::string(name));
}

}  // namespace shiftlab
