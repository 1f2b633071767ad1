#pragma once

// Empirical measures along a Folner window, weak-star neighborhoods of an
// invariant measure, typical-word counting, entropy trajectories from the
// pointwise theorems, the Hamming-ball growth bound, and finite-scale
// genericity certificates.

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "shiftlab/folner.hpp"
#include "shiftlab/group.hpp"
#include "shiftlab/measure.hpp"
#include "shiftlab/shift.hpp"

namespace shiftlab {

// Frequencies (1/|F|) #{g in F : g.x in c} over the test family of cylinders
// supported on the first `depth` enumerated group elements.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(const Configuration& x, const std::vector<GroupElement>& folner_set,
                   int depth);

  // Exact occurrence count of a test cylinder; its support must lie in the
  // enumeration prefix g_1..g_depth.
  std::int64_t count(const Cylinder& cylinder) const;
  double frequency(const Cylinder& cylinder) const;

  const AmenableGroup& group() const { return group_; }
  std::int64_t window_size() const { return window_size_; }
  int depth() const { return depth_; }

 private:
  AmenableGroup group_;
  std::int64_t window_size_ = 0;
  int depth_ = 1;
  // Key packs (support mask, observed symbols); symbols must fit a byte.
  std::unordered_map<std::uint64_t, std::int64_t> counts_;
};

EmpiricalMeasure empirical_measure(const Configuration& x,
                                   const std::vector<GroupElement>& folner_set, int depth);

// Max deviation |frequency(c) - mu(c)| over every nonempty cylinder with
// support inside the enumeration prefix of the empirical depth.
double weak_star_distance(const EmpiricalMeasure& empirical, const InvariantMeasure& mu);

// Frequency box around mu: every test cylinder of support depth <= depth must
// match within the tolerance (1/m unless overridden).
struct NeighborhoodSpec {
  int m = 1;
  int depth = 1;
  std::optional<double> tolerance_override;

  double tolerance() const { return tolerance_override ? *tolerance_override : 1.0 / m; }
  // Depth min(m, 4): deeper test families and tighter tolerances as m grows,
  // so the neighborhoods are nested.
  static NeighborhoodSpec standard(int m);
};

bool in_neighborhood(const Configuration& x, const InvariantMeasure& mu,
                     const std::vector<GroupElement>& folner_set, const NeighborhoodSpec& spec);

struct TypicalWordCount {
  BigInt count;
  double rate = 0.0;  // (1/n) ln count; -infinity when the count is zero
};

// Number of admissible length-n words (resolved at the given scale) whose
// pattern frequencies lie within the neighborhood box around mu. Binary
// Bernoulli at depth 1 and scale 1/2 on the full shift uses exact binomial
// sums; other combinations enumerate words when small enough.
TypicalWordCount count_typical_words(const Subshift& shift, const InvariantMeasure& mu,
                                     std::int64_t n, const NeighborhoodSpec& spec,
                                     double epsilon = 0.5);

struct Trajectory {
  std::vector<std::int64_t> orders;  // strictly increasing
  std::vector<double> values;
  double final_value = 0.0;
  double running_mean = 0.0;
  // Spread max - min over the trailing half of the samples.
  double last_window_oscillation = 0.0;
  std::size_t window = 0;
};

Trajectory make_trajectory(std::vector<std::int64_t> orders, std::vector<double> values);

// Shannon-McMillan-Breiman quantity -(1/|F|) ln mu(atom of the partition
// join over F containing x); +infinity on a zero-mass atom.
double smb_value(const Configuration& x, const InvariantMeasure& mu, const Partition& partition,
                 const std::vector<GroupElement>& folner_set);

Trajectory smb_trajectory(const Configuration& x, const InvariantMeasure& mu,
                          const Partition& partition, const FolnerSequence& seq,
                          const std::vector<int>& schedule);

// Brin-Katok quantity -(1/|F|) ln mu(B_F(x, delta)); +infinity on zero mass.
double brin_katok_value(const Configuration& x, const InvariantMeasure& mu, double delta,
                        const std::vector<GroupElement>& folner_set);

Trajectory brin_katok_trajectory(const Configuration& x, const InvariantMeasure& mu,
                                 double delta, const FolnerSequence& seq,
                                 const std::vector<int>& schedule);

struct StirlingReport {
  BigInt exact_count;         // sum_{j <= floor(qn)} C(n,j) (a-1)^j
  double growth_exponent = 0.0;  // q + q ln(a-1) - q ln q - (1-q) ln(1-q)
  double bound = 0.0;            // exp(growth_exponent * n)
  bool holds = false;            // exact_count <= bound
};

StirlingReport stirling_bound(std::int64_t n, double q, int a);

struct GenericWitness {
  int m = 0;
  int depth = 0;
  std::vector<bool> member;  // aligned with the schedule
  bool witnessed = false;
  std::int64_t threshold = 0;  // least scheduled n with membership from there on
};

struct GenericCertificate {
  std::vector<int> schedule;
  std::vector<GenericWitness> rows;  // m = 1..m_max
};

// Finite-scale evidence only: witnessed thresholds per neighborhood index,
// never a genericity claim.
GenericCertificate generic_point_certificate(const Configuration& x, const InvariantMeasure& mu,
                                             const FolnerSequence& seq, int m_max,
                                             const std::vector<int>& schedule);

}  // namespace shiftlab
