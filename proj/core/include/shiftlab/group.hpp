#pragma once

// Finitely generated amenable groups in canonical integer coordinates:
// Z, Z^2, Z^3 and the discrete Heisenberg group H3(Z). A Heisenberg triple
// (a, b, c) stands for the unitriangular matrix [[1,a,c],[0,1,b],[0,0,1]],
// so (a,b,c)*(a',b',c') = (a+a', b+b', c+c'+a*b').
//
// Every group carries one canonical enumeration g_1 = identity, g_2, ...
// For Z it is the spiral 0, 1, -1, 2, -2, ...; for the rank-2/3 groups
// elements are ordered by (max coordinate norm, lexicographic). The
// enumeration is what ties metrics, Bowen balls and sampled configurations
// together, so it must stay stable.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace shiftlab {

enum class GroupKind { Z, Z2, Z3, Heisenberg };

struct GroupElement {
  std::array<std::int64_t, 3> v{0, 0, 0};  // unused coordinates stay zero
  GroupKind kind = GroupKind::Z;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  // Coordinate-lexicographic order; kind participates only as a tie-breaker
  // and never differs inside one container in practice.
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto step = [&h](std::uint64_t x) {
      h ^= x;
      h *= 0x100000001b3ull;
    };
    for (auto c : g.v) step(static_cast<std::uint64_t>(c));
    step(static_cast<std::uint64_t>(g.kind));
    return static_cast<std::size_t>(h);
  }
};

class AmenableGroup {
 public:
  explicit AmenableGroup(GroupKind kind) : kind_(kind) {}

  GroupKind kind() const { return kind_; }
  // Number of canonical coordinates: 1, 2, 3, 3.
  int dim() const;
  std::string name() const;

  GroupElement identity() const;
  GroupElement element(std::int64_t a, std::int64_t b = 0, std::int64_t c = 0) const;
  GroupElement multiply(const GroupElement& g, const GroupElement& h) const;
  GroupElement inverse(const GroupElement& g) const;
  // Standard generating set (unit vectors; {x, y} for Heisenberg).
  std::vector<GroupElement> generators() const;

  // Canonical enumeration. Indices are 1-based with element_at(1) = identity;
  // element_at and index_of are mutually inverse.
  GroupElement element_at(std::int64_t index) const;
  std::int64_t index_of(const GroupElement& g) const;
  std::vector<GroupElement> enumerate(std::int64_t count) const;

  friend bool operator==(const AmenableGroup& a, const AmenableGroup& b) {
    return a.kind_ == b.kind_;
  }

 private:
  void require_own(const GroupElement& g, const char* op) const;
  GroupKind kind_;
};

// Parses "Z", "Z2", "Z3", "Heisenberg" (case-insensitive).
AmenableGroup group_from_name(std::string_view name);

}  // namespace shiftlab
