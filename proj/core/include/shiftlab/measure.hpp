#pragma once

// Shift-invariant product and Markov measures: exact cylinder mass, log-space
// mass, closed-form entropies, joined partition entropy, and deterministic
// sampling of typical points.

#include <cstdint>
#include <optional>
#include <vector>

#include "shiftlab/group.hpp"
#include "shiftlab/shift.hpp"

namespace shiftlab {

class InvariantMeasure {
 public:
  enum class Kind { Bernoulli, Markov };

  // Independent coordinates with law p, over any implemented group.
  static InvariantMeasure bernoulli(AmenableGroup group, std::vector<double> p);
  // Stationary Markov chain over Z. The stationary vector is solved from the
  // transition matrix when omitted; a supplied one is validated against it.
  static InvariantMeasure markov(std::vector<std::vector<double>> transition,
                                 std::optional<std::vector<double>> stationary = std::nullopt);

  Kind kind() const { return kind_; }
  const AmenableGroup& group() const { return group_; }
  int alphabet_size() const { return alphabet_size_; }
  const std::vector<double>& probabilities() const;       // Bernoulli only
  const std::vector<std::vector<double>>& transition() const;  // Markov only
  const std::vector<double>& stationary() const;          // Markov only

  // Exact product (Bernoulli) or chain product (Markov); gaps in a Markov
  // support marginalize through powers of the transition matrix.
  double cylinder_mass(const Cylinder& c) const;
  // ln of the mass, grouped by repeated factors so equal-probability cases
  // stay exact and long cylinders cannot underflow. -inf when the mass is 0.
  double log_cylinder_mass(const Cylinder& c) const;
  double entropy_closed_form() const;

  Configuration sample_configuration(std::uint64_t seed) const;

 private:
  InvariantMeasure() : group_(GroupKind::Z) {}

  Kind kind_ = Kind::Bernoulli;
  AmenableGroup group_;
  int alphabet_size_ = 0;
  std::vector<double> p_;
  std::vector<std::vector<double>> transition_;
  std::vector<double> stationary_;
};

class Partition {
 public:
  // {[a]_e : a in alphabet}, the generating partition of a subshift.
  static Partition zero_coordinate(const AmenableGroup& group, int alphabet_size);
  // Explicit cylinder atoms; pairwise disjointness is required and checked
  // (two consistent cylinders overlap), exhaustiveness is checked pointwise
  // by atom_index_of.
  static Partition from_atoms(std::vector<Cylinder> atoms);

  const std::vector<Cylinder>& atoms() const { return atoms_; }
  std::size_t atom_index_of(const Configuration& x) const;
  bool is_zero_coordinate(const AmenableGroup& group, int alphabet_size) const;

 private:
  std::vector<Cylinder> atoms_;
};

// Entropy of the join of the partition translated over the given finite set,
// - sum mass * ln mass over joined atoms. Zero-coordinate partitions use the
// closed forms (product law, chain rule over sorted coordinate gaps); general
// partitions enumerate joined atoms as merged cylinders with conflict pruning.
double partition_entropy(const InvariantMeasure& mu, const Partition& partition,
                         const std::vector<GroupElement>& folner_set,
                         std::int64_t atom_cap = 2'000'000);

}  // namespace shiftlab
