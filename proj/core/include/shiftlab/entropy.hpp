#pragma once

// Topological entropy estimates at a fixed resolution, the Caratheodory
// covering quantity as weighted set cover over ball cylinders, the critical
// exponent via bisection, and separated subsets of finite point families.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "shiftlab/folner.hpp"
#include "shiftlab/group.hpp"
#include "shiftlab/shift.hpp"

namespace shiftlab {

// A subset of the shift space, in one of three finitely describable forms.
class SubsetSpec {
 public:
  enum class Kind { WholeSpace, CylinderUnion, PointList };

  static SubsetSpec whole_space();
  static SubsetSpec cylinder_union(std::vector<Cylinder> cylinders);
  // The points enter the cover construction through their restrictions to the
  // stated domain, i.e. as the union of the corresponding cylinders.
  static SubsetSpec point_list(std::vector<Configuration> points,
                               std::vector<GroupElement> domain);

  Kind kind() const { return kind_; }
  const std::vector<Cylinder>& cylinders() const { return cylinders_; }
  const std::vector<Configuration>& points() const { return points_; }
  const std::vector<GroupElement>& point_domain() const { return point_domain_; }

 private:
  SubsetSpec() = default;
  Kind kind_ = Kind::WholeSpace;
  std::vector<Cylinder> cylinders_;
  std::vector<Configuration> points_;
  std::vector<GroupElement> point_domain_;
};

struct CoverLimits {
  std::int64_t universe_cap = 200'000;
  std::int64_t candidate_cap = 500'000;
  std::int64_t node_cap = 2'000'000;
};

struct CoverCandidate {
  Cylinder ball;                     // admissible pattern on the order's domain
  std::int64_t order = 0;            // n_i with n_lo <= n_i <= n_hi
  std::int64_t folner_cardinality = 0;  // |F_{n_i}|, the weight exponent
};

// The subset resolved at scale (epsilon, n_hi) together with every candidate
// ball and its coverage. Weights exp(-s |F_{n_i}|) are a function of s and
// are attached at solve time, so one instance serves a whole bisection.
struct CoverInstance {
  std::vector<Cylinder> universe;          // target cylinders, sorted, distinct
  std::vector<CoverCandidate> candidates;  // sorted by (order, ball)
  std::vector<std::vector<std::int32_t>> coverage;  // candidate -> target indices
  double epsilon = 0.0;
  std::int64_t n_lo = 0;
  std::int64_t n_hi = 0;
};

enum class CoverSolver { Greedy, Exact };

struct CoverSolution {
  std::vector<std::size_t> chosen;  // candidate indices into the instance
  double total_cost = 0.0;
  double s = 0.0;
  bool exact = false;  // minimal cost, vs greedy upper bound
};

struct EntropyEstimate {
  double value = 0.0;
  double epsilon = 0.0;
  std::int64_t n_lo = 0;
  std::int64_t n_hi = 0;
  std::string method;
  // (s, cost) in evaluation order for the critical-exponent search.
  std::vector<std::pair<double, double>> cost_trace;
  bool bracket_extended = false;  // the crossing lay above ln k + 1
};

CoverInstance build_cover_instance(const Subshift& shift, const SubsetSpec& subset,
                                   const FolnerSequence& seq, std::int64_t n_lo,
                                   std::int64_t n_hi, double epsilon,
                                   const CoverLimits& limits = {});

double candidate_weight(const CoverCandidate& candidate, double s);

CoverSolution solve_cover(const CoverInstance& instance, double s, CoverSolver solver,
                          const CoverLimits& limits = {});

// Minimal (exact) or near-minimal (greedy) total weight of a ball family
// covering the subset at the given scale.
CoverSolution caratheodory_cost(const Subshift& shift, const SubsetSpec& subset,
                                const FolnerSequence& seq, std::int64_t n_lo,
                                std::int64_t n_hi, double epsilon, double s,
                                CoverSolver solver, const CoverLimits& limits = {});

// Critical exponent: bisection for the crossing cost = 1, to absolute
// tolerance s_tolerance, bracket [0, ln k + 1] with recorded extension.
EntropyEstimate bowen_entropy_estimate(const Subshift& shift, const SubsetSpec& subset,
                                       const FolnerSequence& seq, double epsilon,
                                       std::int64_t n_lo, std::int64_t n_hi,
                                       CoverSolver solver = CoverSolver::Greedy,
                                       const CoverLimits& limits = {},
                                       double s_tolerance = 1e-3);

// (1/|F_n|) ln #(admissible patterns on the resolved domain of F_n).
EntropyEstimate topological_entropy_estimate(const Subshift& shift, const FolnerSequence& seq,
                                             std::int64_t n, double epsilon);

enum class SeparationMode { Greedy, Exact };

struct SeparatedSet {
  std::vector<std::size_t> indices;  // kept points, ascending
  std::size_t cardinality = 0;
};

// Pairwise separation decided as disagreement of restrictions on the
// resolved domain; greedy keeps a maximal family, exact finds a maximum one
// by branch and bound (at most exact_cap points).
SeparatedSet separated_set_max(const std::vector<Configuration>& points,
                               const std::vector<GroupElement>& folner_set, double epsilon,
                               SeparationMode mode, std::size_t exact_cap = 24);

}  // namespace shiftlab
