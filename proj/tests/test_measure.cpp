#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "shiftlab/errors.hpp"
#include "shiftlab/folner.hpp"
#include "shiftlab/group.hpp"
#include "shiftlab/measure.hpp"
#include "shiftlab/shift.hpp"

using namespace shiftlab;

namespace {

GroupElement ze(std::int64_t m) { return GroupElement{{m, 0, 0}, GroupKind::Z}; }

std::vector<GroupElement> z_range(std::int64_t lo, std::int64_t hi) {
  std::vector<GroupElement> out;
  for (std::int64_t m = lo; m <= hi; ++m) out.push_back(ze(m));
  return out;
}

InvariantMeasure example_markov() {
  return InvariantMeasure::markov({{0.9, 0.1}, {0.5, 0.5}});
}

Cylinder random_z_cylinder(std::mt19937_64& rng, int cells, int k, std::int64_t span) {
  std::uniform_int_distribution<std::int64_t> coord(-span, span);
  std::uniform_int_distribution<int> sym(0, k - 1);
  std::set<std::int64_t> used;
  std::vector<Cylinder::Entry> entries;
  while (static_cast<int>(entries.size()) < cells) {
    const std::int64_t c = coord(rng);
    if (!used.insert(c).second) continue;
    entries.emplace_back(ze(c), sym(rng));
  }
  return Cylinder(std::move(entries));
}

constexpr double kMarkovEntropyRate = 0.38642700791953105;
constexpr double kMarkovStationaryEntropy = 0.45056120886630463;
constexpr double kEntropy03 = 0.6108643020548935;

}  // namespace

TEST_SUITE_BEGIN("measure");

TEST_CASE("measure construction validates inputs") {
  AmenableGroup z(GroupKind::Z);
  CHECK_THROWS_AS(InvariantMeasure::bernoulli(z, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(InvariantMeasure::bernoulli(z, {0.6, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(InvariantMeasure::bernoulli(z, {-0.1, 1.1}), std::invalid_argument);
  CHECK_NOTHROW(InvariantMeasure::bernoulli(z, {1.0, 0.0}));
  CHECK_NOTHROW(InvariantMeasure::bernoulli(AmenableGroup(GroupKind::Heisenberg), {0.3, 0.7}));

  CHECK_THROWS_AS(InvariantMeasure::markov({{0.9, 0.2}, {0.5, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(InvariantMeasure::markov({{0.9, 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(InvariantMeasure::markov({{0.9, 0.1}, {0.5, 0.5}}, {{0.5, 0.5}}),
                  std::invalid_argument);
  // Reducible chain: stationary mass escapes state 1.
  CHECK_THROWS_AS(InvariantMeasure::markov({{1.0, 0.0}, {0.5, 0.5}}), std::invalid_argument);

  InvariantMeasure mu = example_markov();
  REQUIRE(mu.kind() == InvariantMeasure::Kind::Markov);
  CHECK(mu.stationary()[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-13));
  CHECK(mu.stationary()[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK_NOTHROW(InvariantMeasure::markov({{0.9, 0.1}, {0.5, 0.5}}, {{5.0 / 6.0, 1.0 / 6.0}}));
}

TEST_CASE("cylinder mass closed forms") {
  AmenableGroup z(GroupKind::Z);
  InvariantMeasure fair = InvariantMeasure::bernoulli(z, {0.5, 0.5});
  for (int n : {1, 3, 8}) {
    Cylinder c = Cylinder::restriction_of(
        window_configuration(z, Cylinder({{ze(0), 1}}), 0), z_range(0, n - 1));
    CHECK(fair.cylinder_mass(c) == std::ldexp(1.0, -n));
  }
  CHECK(fair.cylinder_mass(Cylinder()) == 1.0);

  InvariantMeasure skew = InvariantMeasure::bernoulli(z, {0.3, 0.7});
  CHECK(skew.cylinder_mass(Cylinder({{ze(0), 0}, {ze(5), 1}})) == doctest::Approx(0.21).epsilon(1e-15));

  InvariantMeasure mu = example_markov();
  CHECK(mu.cylinder_mass(Cylinder({{ze(0), 0}, {ze(1), 1}})) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  // Gap of 2 marginalizes through P^2; (P^2)_01 = 0.14.
  CHECK(mu.cylinder_mass(Cylinder({{ze(0), 0}, {ze(2), 1}})) ==
        doctest::Approx(5.0 / 6.0 * 0.14).epsilon(1e-13));
  double by_hand = 0.0;
  for (Symbol mid : {0, 1}) {
    by_hand += mu.cylinder_mass(Cylinder({{ze(0), 0}, {ze(1), mid}, {ze(2), 1}}));
  }
  CHECK(mu.cylinder_mass(Cylinder({{ze(0), 0}, {ze(2), 1}})) ==
        doctest::Approx(by_hand).epsilon(1e-14));

  CHECK_THROWS_AS(fair.cylinder_mass(Cylinder({{ze(0), 2}})), std::domain_error);
  CHECK_THROWS_AS(mu.cylinder_mass(Cylinder({{ze(0), -1}})), std::domain_error);
}

TEST_CASE("translation invariance of cylinder mass") {
  std::mt19937_64 rng(5501);
  for (GroupKind kind : {GroupKind::Z, GroupKind::Z2, GroupKind::Heisenberg}) {
    AmenableGroup grp(kind);
    InvariantMeasure mu = InvariantMeasure::bernoulli(grp, {0.3, 0.5, 0.2});
    std::uniform_int_distribution<std::int64_t> coord(-20, 20);
    for (int trial = 0; trial < 70; ++trial) {
      std::vector<Cylinder::Entry> entries;
      std::set<GroupElement> used;
      for (int i = 0; i < 5; ++i) {
        GroupElement e = grp.identity();
        for (int d = 0; d < grp.dim(); ++d) e.v[d] = coord(rng);
        if (used.insert(e).second) {
          entries.emplace_back(e, static_cast<Symbol>(trial % 3 == 0 ? i % 3 : (i + 1) % 3));
        }
      }
      Cylinder c(std::move(entries));
      GroupElement g = grp.identity();
      for (int d = 0; d < grp.dim(); ++d) g.v[d] = coord(rng);
      CHECK(mu.cylinder_mass(c) == mu.cylinder_mass(c.translated(grp, g)));
    }
  }

  InvariantMeasure mu = example_markov();
  AmenableGroup z(GroupKind::Z);
  std::mt19937_64 rng2(5502);
  std::uniform_int_distribution<std::int64_t> shift(-50, 50);
  for (int trial = 0; trial < 200; ++trial) {
    Cylinder c = random_z_cylinder(rng2, 4, 2, 15);
    const double base = mu.cylinder_mass(c);
    const double moved = mu.cylinder_mass(c.translated(z, ze(shift(rng2))));
    CHECK(moved == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("mass is additive over one-coordinate refinements") {
  std::mt19937_64 rng(6607);
  AmenableGroup z(GroupKind::Z);
  InvariantMeasure bern = InvariantMeasure::bernoulli(z, {0.3, 0.7});
  InvariantMeasure mark = example_markov();
  for (int trial = 0; trial < 60; ++trial) {
    Cylinder c = random_z_cylinder(rng, 4, 2, 10);
    std::uniform_int_distribution<std::int64_t> coord(-12, 12);
    std::int64_t fresh = coord(rng);
    while (c.at(ze(fresh)).has_value()) fresh = coord(rng);
    for (const auto& mu : {bern, mark}) {
      double refined = 0.0;
      for (Symbol a : {0, 1}) refined += mu.cylinder_mass(c.merged(Cylinder({{ze(fresh), a}})));
      CHECK(refined == doctest::Approx(mu.cylinder_mass(c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("log mass agrees with mass and handles zeros") {
  AmenableGroup z(GroupKind::Z);
  std::mt19937_64 rng(7703);
  InvariantMeasure bern = InvariantMeasure::bernoulli(z, {0.3, 0.7});
  InvariantMeasure mark = example_markov();
  for (int trial = 0; trial < 50; ++trial) {
    Cylinder c = random_z_cylinder(rng, 6, 2, 12);
    for (const auto& mu : {bern, mark}) {
      CHECK(mu.log_cylinder_mass(c) ==
            doctest::Approx(std::log(mu.cylinder_mass(c))).epsilon(1e-12));
    }
  }

  // A 2000-coordinate cylinder has mass far below double range, but its log
  // mass is still finite and exact.
  InvariantMeasure fair = InvariantMeasure::bernoulli(z, {0.5, 0.5});
  Cylinder big = Cylinder::restriction_of(fair.sample_configuration(11), z_range(0, 1999));
  CHECK(fair.cylinder_mass(big) == 0.0);  // underflow, the motivation for logs
  CHECK(fair.log_cylinder_mass(big) == doctest::Approx(-2000.0 * std::log(2.0)).epsilon(1e-15));

  InvariantMeasure degenerate = InvariantMeasure::bernoulli(z, {1.0, 0.0});
  CHECK(degenerate.log_cylinder_mass(Cylinder({{ze(0), 1}})) ==
        -std::numeric_limits<double>::infinity());
  CHECK(degenerate.log_cylinder_mass(Cylinder({{ze(0), 0}})) == 0.0);

  InvariantMeasure absorbing = InvariantMeasure::markov({{0.0, 1.0}, {0.5, 0.5}});
  CHECK(absorbing.log_cylinder_mass(Cylinder({{ze(0), 0}, {ze(1), 0}})) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("closed-form entropies") {
  AmenableGroup z(GroupKind::Z);
  CHECK(InvariantMeasure::bernoulli(z, {0.5, 0.5}).entropy_closed_form() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(InvariantMeasure::bernoulli(z, {0.3, 0.7}).entropy_closed_form() ==
        doctest::Approx(kEntropy03).epsilon(1e-15));
  CHECK(InvariantMeasure::bernoulli(z, {1.0, 0.0}).entropy_closed_form() == 0.0);
  CHECK(example_markov().entropy_closed_form() ==
        doctest::Approx(kMarkovEntropyRate).epsilon(1e-14));
}

TEST_CASE("partitions classify sampled points") {
  for (GroupKind kind : {GroupKind::Z, GroupKind::Z2, GroupKind::Heisenberg}) {
    AmenableGroup grp(kind);
    Partition p = Partition::zero_coordinate(grp, 3);
    REQUIRE(p.atoms().size() == 3);
    CHECK(p.is_zero_coordinate(grp, 3));
    InvariantMeasure mu = InvariantMeasure::bernoulli(grp, {0.2, 0.5, 0.3});
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      Configuration x = mu.sample_configuration(seed);
      const std::size_t idx = p.atom_index_of(x);
      CHECK(idx == static_cast<std::size_t>(x.symbol_at(grp.identity())));
      int matches = 0;
      for (const auto& atom : p.atoms()) matches += atom.matches(x) ? 1 : 0;
      CHECK(matches == 1);
    }
  }

  AmenableGroup z(GroupKind::Z);
  // Two-coordinate partition: 4 atoms over {0,1}.
  std::vector<Cylinder> atoms;
  for (Symbol a : {0, 1}) {
    for (Symbol b : {0, 1}) atoms.push_back(Cylinder({{ze(0), a}, {ze(1), b}}));
  }
  Partition q = Partition::from_atoms(atoms);
  CHECK_FALSE(q.is_zero_coordinate(z, 2));
  CHECK(q.atom_index_of(window_configuration(z, Cylinder({{ze(1), 1}}), 0)) == 1);

  CHECK_THROWS_AS(Partition::from_atoms({Cylinder({{ze(0), 0}}), Cylinder({{ze(1), 1}})}),
                  std::invalid_argument);
  Partition partial = Partition::from_atoms({Cylinder({{ze(0), 0}, {ze(1), 0}}),
                                             Cylinder({{ze(0), 1}, {ze(1), 1}})});
  CHECK_THROWS_AS(partial.atom_index_of(window_configuration(z, Cylinder({{ze(0), 1}}), 0)),
                  std::domain_error);
}

TEST_CASE("partition entropy closed forms and enumeration agree") {
  AmenableGroup z(GroupKind::Z);
  Partition p2 = Partition::zero_coordinate(z, 2);
  InvariantMeasure fair = InvariantMeasure::bernoulli(z, {0.5, 0.5});
  InvariantMeasure skew = InvariantMeasure::bernoulli(z, {0.3, 0.7});
  InvariantMeasure mark = example_markov();

  CHECK(partition_entropy(fair, p2, z_range(0, 9)) ==
        doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(partition_entropy(skew, p2, {z.identity()}) ==
        doctest::Approx(kEntropy03).epsilon(1e-15));
  CHECK(partition_entropy(skew, p2, {}) == 0.0);

  // The enumeration route (forced by a non-canonical but equivalent atom
  // order) must reproduce the closed forms.
  Partition swapped = Partition::from_atoms({Cylinder({{ze(0), 1}}), Cylinder({{ze(0), 0}})});
  for (int n = 1; n <= 12; ++n) {
    CHECK(partition_entropy(skew, swapped, z_range(0, n - 1)) ==
          doctest::Approx(n * kEntropy03).epsilon(1e-12));
    CHECK(partition_entropy(mark, swapped, z_range(0, n - 1)) ==
          doctest::Approx(partition_entropy(mark, p2, z_range(0, n - 1))).epsilon(1e-12));
  }

  // Markov chain rule: contiguous boxes give H(pi) + (n-1) h.
  for (int n : {1, 2, 5, 30, 2000}) {
    CHECK(partition_entropy(mark, p2, z_range(0, n - 1)) ==
          doctest::Approx(kMarkovStationaryEntropy + (n - 1) * kMarkovEntropyRate)
              .epsilon(1e-12));
  }
  // Gapped support {0, 2}: conditional entropy through P^2.
  CHECK(partition_entropy(mark, p2, {ze(0), ze(2)}) ==
        doctest::Approx(0.8898414967620689).epsilon(1e-13));

  // Per-site entropy is non-increasing in n for the chain.
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= 64; ++n) {
    const double site = partition_entropy(mark, p2, z_range(0, n - 1)) / n;
    CHECK(site <= prev + 1e-12);
    prev = site;
  }

  AmenableGroup z2(GroupKind::Z2);
  InvariantMeasure fair2 = InvariantMeasure::bernoulli(z2, {0.5, 0.5});
  FolnerSequence boxes(z2, FolnerFamily::Boxes);
  CHECK(partition_entropy(fair2, Partition::zero_coordinate(z2, 2), boxes.set(3)) ==
        doctest::Approx(9.0 * std::log(2.0)).epsilon(1e-15));

  CHECK_THROWS_AS(partition_entropy(fair, swapped, z_range(0, 40), 1000), ResourceLimitError);
}

TEST_CASE("sampling is deterministic and matches the law") {
  AmenableGroup z(GroupKind::Z);
  InvariantMeasure sure = InvariantMeasure::bernoulli(z, {1.0, 0.0});
  Configuration fixed = sure.sample_configuration(99);
  for (std::int64_t m = -50; m <= 50; ++m) CHECK(fixed.symbol_at(ze(m)) == 0);

  InvariantMeasure fair = InvariantMeasure::bernoulli(z, {0.5, 0.5});
  Configuration a = fair.sample_configuration(42);
  Configuration b = fair.sample_configuration(42);
  Configuration c = fair.sample_configuration(43);
  std::mt19937_64 rng(1201);
  std::uniform_int_distribution<std::int64_t> coord(-100000, 100000);
  int diff = 0;
  for (int i = 0; i < 1000; ++i) {
    const GroupElement g = ze(coord(rng));
    CHECK(a.symbol_at(g) == b.symbol_at(g));
    diff += a.symbol_at(g) != c.symbol_at(g) ? 1 : 0;
  }
  CHECK(diff > 300);  // distinct seeds give genuinely different points

  std::int64_t ones = 0;
  for (std::int64_t m = 0; m < 10000; ++m) ones += a.symbol_at(ze(m));
  CHECK(std::abs(ones / 10000.0 - 0.5) < 0.02);

  InvariantMeasure skew = InvariantMeasure::bernoulli(AmenableGroup(GroupKind::Z2), {0.3, 0.7});
  AmenableGroup z2(GroupKind::Z2);
  Configuration s = skew.sample_configuration(7);
  std::int64_t zeros = 0;
  for (std::int64_t i = 0; i < 100; ++i) {
    for (std::int64_t j = 0; j < 100; ++j) zeros += s.symbol_at(z2.element(i, j)) == 0 ? 1 : 0;
  }
  CHECK(std::abs(zeros / 10000.0 - 0.3) < 0.02);
}

TEST_CASE("markov sampling follows the chain in both directions") {
  InvariantMeasure mu = example_markov();
  AmenableGroup z(GroupKind::Z);
  Configuration x = mu.sample_configuration(17);
  Configuration y = mu.sample_configuration(17);

  // Querying far negative coordinates first must not change anything.
  const Symbol probe = y.symbol_at(ze(-4000));
  for (std::int64_t m : {-4000, -17, -1, 0, 1, 5, 300}) {
    CHECK(x.symbol_at(ze(m)) == y.symbol_at(ze(m)));
  }
  CHECK(probe == x.symbol_at(ze(-4000)));

  // Empirical symbol frequency approaches the stationary law on both sides.
  std::int64_t zeros_pos = 0, zeros_neg = 0;
  for (std::int64_t m = 0; m < 5000; ++m) zeros_pos += x.symbol_at(ze(m)) == 0 ? 1 : 0;
  for (std::int64_t m = 1; m <= 5000; ++m) zeros_neg += x.symbol_at(ze(-m)) == 0 ? 1 : 0;
  CHECK(std::abs(zeros_pos / 5000.0 - 5.0 / 6.0) < 0.03);
  CHECK(std::abs(zeros_neg / 5000.0 - 5.0 / 6.0) < 0.03);

  // Transition frequencies across the full window, including the seam at 0.
  std::int64_t from0 = 0, trans01 = 0;
  for (std::int64_t m = -5000; m < 5000; ++m) {
    if (x.symbol_at(ze(m)) == 0) {
      ++from0;
      trans01 += x.symbol_at(ze(m + 1)) == 1 ? 1 : 0;
    }
  }
  CHECK(std::abs(static_cast<double>(trans01) / static_cast<double>(from0) - 0.1) < 0.02);
}

TEST_SUITE_END();
