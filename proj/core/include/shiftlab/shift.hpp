#pragma once

// Subshifts over the implemented groups: configurations, cylinder sets, the
// coordinate enumeration metric, Bowen balls, and admissible pattern counting.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "shiftlab/group.hpp"

namespace shiftlab {

using Symbol = std::int32_t;
using BigInt = boost::multiprecision::cpp_int;

// Natural log of a positive big integer, accurate to double precision.
double log_big(const BigInt& value);

class Configuration;

// Finite partial assignment of symbols to group elements. Entries are kept
// sorted by coordinate, so equality and ordering are structural.
class Cylinder {
 public:
  using Entry = std::pair<GroupElement, Symbol>;

  Cylinder() = default;
  // Sorts entries; exact duplicates collapse, conflicting duplicates throw.
  explicit Cylinder(std::vector<Entry> entries);

  static Cylinder restriction_of(const Configuration& x,
                                 const std::vector<GroupElement>& domain);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::vector<GroupElement> support() const;
  std::optional<Symbol> at(const GroupElement& g) const;

  // Support map h -> h*g; the assignment travels with its coordinate.
  Cylinder translated(const AmenableGroup& group, const GroupElement& g) const;
  bool consistent_with(const Cylinder& other) const;
  // Union of the two constraint sets; conflicting assignments throw.
  Cylinder merged(const Cylinder& other) const;
  Cylinder restricted(const std::vector<GroupElement>& domain) const;
  // True when every constraint of *this also appears in finer, i.e. the set
  // of configurations described by finer lies inside the one described here.
  bool covers(const Cylinder& finer) const;
  bool matches(const Configuration& x) const;

  friend auto operator<=>(const Cylinder&, const Cylinder&) = default;

 private:
  std::vector<Entry> entries_;
};

// Deterministic total symbol map on a group; the backing store behind
// Configuration. Implementations must be immutable or internally synchronized.
class SymbolSource {
 public:
  virtual ~SymbolSource() = default;
  virtual const AmenableGroup& group() const = 0;
  virtual Symbol symbol_at(const GroupElement& g) const = 0;
};

// A point of the shift space. Holds a shared backing plus a translation
// offset, so the group action is O(1) and never copies symbol data.
class Configuration {
 public:
  explicit Configuration(std::shared_ptr<const SymbolSource> source);

  const AmenableGroup& group() const { return source_->group(); }
  Symbol symbol_at(const GroupElement& h) const {
    return source_->symbol_at(group().multiply(h, offset_));
  }
  const GroupElement& offset() const { return offset_; }

 private:
  Configuration(std::shared_ptr<const SymbolSource> source, GroupElement offset)
      : source_(std::move(source)), offset_(offset) {}

  std::shared_ptr<const SymbolSource> source_;
  GroupElement offset_;

  friend Configuration act(const GroupElement& g, const Configuration& x);
};

// Left action with the convention (g.x)(h) = x(h*g).
Configuration act(const GroupElement& g, const Configuration& x);

// Repeats a fundamental pattern with one period per coordinate. The symbol
// depends only on coordinates reduced modulo the periods, which keeps the map
// total on every implemented group, including the non-abelian one.
class PeriodicSource final : public SymbolSource {
 public:
  PeriodicSource(AmenableGroup group, std::vector<std::int64_t> periods,
                 std::vector<Symbol> pattern);

  const AmenableGroup& group() const override { return group_; }
  Symbol symbol_at(const GroupElement& g) const override;
  const std::vector<std::int64_t>& periods() const { return periods_; }

 private:
  AmenableGroup group_;
  std::array<std::int64_t, 3> period_{1, 1, 1};
  std::vector<std::int64_t> periods_;
  std::vector<Symbol> pattern_;
};

// Finitely supported override of a constant background symbol.
class WindowSource final : public SymbolSource {
 public:
  WindowSource(AmenableGroup group, const Cylinder& cells, Symbol background);

  const AmenableGroup& group() const override { return group_; }
  Symbol symbol_at(const GroupElement& g) const override;

 private:
  AmenableGroup group_;
  std::unordered_map<GroupElement, Symbol, GroupElementHash> cells_;
  Symbol background_;
};

class Subshift {
 public:
  Subshift(AmenableGroup group, int alphabet_size,
           std::vector<Cylinder> forbidden_patterns = {});

  const AmenableGroup& group() const { return group_; }
  int alphabet_size() const { return alphabet_size_; }
  const std::vector<Cylinder>& forbidden_patterns() const { return forbidden_; }
  bool is_full_shift() const { return forbidden_.empty(); }

  // Local admissibility: no translate of a forbidden pattern embeds fully
  // inside the given assignment.
  bool admits(const Cylinder& pattern) const;

 private:
  AmenableGroup group_;
  int alphabet_size_;
  std::vector<Cylinder> forbidden_;
};

// Periodic point of the subshift; throws std::invalid_argument if any
// forbidden pattern embeds anywhere in the (infinite) configuration. The
// check covers one fundamental box of translates, enlarged enough in the
// middle coordinate to account for the Heisenberg twist.
Configuration periodic_configuration(const Subshift& shift,
                                     std::vector<std::int64_t> periods,
                                     std::vector<Symbol> pattern);

Configuration window_configuration(const AmenableGroup& group,
                                   const Cylinder& cells, Symbol background);

struct MetricValue {
  double value = 0.0;
  // Set when no disagreement was found up to the requested depth; the true
  // distance is then below 2^-depth but unknown.
  bool truncated = false;
};

// d(x,y) = 2^-i at the first enumeration index i <= depth where the
// configurations disagree.
MetricValue metric_distance(const Configuration& x, const Configuration& y,
                            std::int64_t depth);

// Number of enumeration coordinates resolved at scale epsilon.
int bowen_depth(double epsilon);

// {g_i * f : 1 <= i <= bowen_depth(epsilon), f in folner_set}, sorted.
std::vector<GroupElement> bowen_domain(const AmenableGroup& group,
                                       const std::vector<GroupElement>& folner_set,
                                       double epsilon);

struct BowenBall {
  Configuration center;
  std::vector<GroupElement> folner_set;
  double epsilon = 0.0;
  std::vector<GroupElement> resolved_domain;
  Cylinder cylinder;  // center restricted to resolved_domain

  bool contains(const Configuration& y) const { return cylinder.matches(y); }
};

BowenBall bowen_ball(const Configuration& x,
                     const std::vector<GroupElement>& folner_set, double epsilon);

inline constexpr std::int64_t kDefaultPatternCap = 100'000'000;

// Number of locally admissible assignments on the window, by backtracking
// over embedded forbidden constraints. Full shifts use the closed form.
std::int64_t pattern_count(const Subshift& shift,
                           const std::vector<GroupElement>& window,
                           std::int64_t cap = kDefaultPatternCap);

// True when the subshift lives over Z and every forbidden pattern has
// contiguous support, so a transfer matrix applies.
bool has_contiguous_z_forbidden(const Subshift& shift);

// Exact count of admissible words of length n for a contiguous-forbidden
// subshift over Z, via big-integer dynamic programming on (L-1)-prefixes.
BigInt transfer_matrix_count(const Subshift& shift, std::int64_t n);

// ln pattern_count with closed-form and transfer-matrix fast paths, so large
// windows never materialize the count.
double log_pattern_count(const Subshift& shift,
                         const std::vector<GroupElement>& window,
                         std::int64_t cap = kDefaultPatternCap);

// All locally admissible assignments on the window that extend the fixed
// partial assignment (whose support must lie inside the window).
std::vector<Cylinder> admissible_patterns(const Subshift& shift,
                                          const std::vector<GroupElement>& window,
                                          const Cylinder& fixed = Cylinder(),
                                          std::int64_t cap = 1'000'000);

// Streams every locally admissible assignment without materializing the
// list. Words are symbol vectors over the sorted, deduplicated window.
void for_each_admissible_pattern(const Subshift& shift,
                                 const std::vector<GroupElement>& window,
                                 const std::function<void(const std::vector<Symbol>&)>& visit);

}  // namespace shiftlab
